#pragma once

#include <memory>

#include "flowrec/field.hpp"

namespace flowrec {

enum class KernelKind { gaussian, identity };

// Componentwise convolution with the matrix kernel
// k(x,y) = exp(-|x-y|^2 / (2 sigma^2)) * I, applied with the cell-area
// quadrature weight. The Gaussian has unit peak (no normalization). The
// convolution is linear (zero beyond the domain), realized by FFT on a grid
// zero-padded to at least (2nx-1, 2ny-1). The identity kind returns its
// input bitwise.
class KernelOp {
 public:
  KernelOp();
  ~KernelOp();
  KernelOp(KernelOp&&) noexcept;
  KernelOp& operator=(KernelOp&&) noexcept;
  KernelOp(const KernelOp&) = delete;
  KernelOp& operator=(const KernelOp&) = delete;

  KernelKind kind() const;
  double sigma() const;

  ScalarField apply(const ScalarField& u) const;
  VectorField apply(const VectorField& u) const;

  friend KernelOp make_kernel_op(const Grid& grid, double sigma,
                                 KernelKind kind);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

KernelOp make_kernel_op(const Grid& grid, double sigma, KernelKind kind);

// Fraction of spectral energy above half the Nyquist frequency on either
// axis, from the discrete Fourier magnitudes.
double highfreq_fraction(const ScalarField& u);
double highfreq_fraction(const VectorField& u);

}  // namespace flowrec
