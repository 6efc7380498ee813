#pragma once

#include <stdexcept>

namespace flowrec {

// Gate times t_i = i/gates for i = 0..gates; each gate interval is refined
// into steps_per_gate sub-steps, giving fine nodes tau_j = j/(gates*steps_per_gate)
// for j = 0..fine_count(). Gate i sits at fine index i*steps_per_gate.
struct TimeGrid {
  int gates = 1;
  int steps_per_gate = 1;

  int fine_count() const { return gates * steps_per_gate; }
  double dt() const { return 1.0 / fine_count(); }
  double tau(int j) const { return static_cast<double>(j) / fine_count(); }
  double gate_time(int i) const { return static_cast<double>(i) / gates; }
  int gate_fine_index(int i) const { return i * steps_per_gate; }
};

inline TimeGrid make_time_grid(int gates, int steps_per_gate) {
  if (gates < 1 || steps_per_gate < 1)
    throw std::invalid_argument("make_time_grid: bad parameters");
  return TimeGrid{gates, steps_per_gate};
}

}  // namespace flowrec
