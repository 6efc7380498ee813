#pragma once

#include <vector>

#include "flowrec/grid.hpp"

namespace flowrec {

struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid(g), v(g.size(), 0.0) {}

  double& at(int i, int j) { return v[grid.idx(i, j)]; }
  double at(int i, int j) const { return v[grid.idx(i, j)]; }
  double* data() { return v.data(); }
  const double* data() const { return v.data(); }
  void fill(double c) { std::fill(v.begin(), v.end(), c); }
};

// Two-component field stored as separate x/y planes.
struct VectorField {
  Grid grid;
  std::vector<double> x, y;

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}

  void fill(double cx, double cy) {
    std::fill(x.begin(), x.end(), cx);
    std::fill(y.begin(), y.end(), cy);
  }
  bool is_zero() const {
    for (double a : x)
      if (a != 0.0) return false;
    for (double a : y)
      if (a != 0.0) return false;
    return true;
  }
};

}  // namespace flowrec
