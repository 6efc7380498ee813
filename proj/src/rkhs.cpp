#include "flowrec/rkhs.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace flowrec {

namespace {

// Smallest 5-smooth size >= n, which FFTW handles without slow generic paths.
int next_fast_size(int n) {
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace

struct KernelOp::Impl {
  Grid grid;
  KernelKind kind = KernelKind::identity;
  double sigma = 0.0;
  int lx = 0, ly = 0;  // padded real-space size
  std::vector<std::complex<double>> khat;
  double* pad = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (pad) fftw_free(pad);
    if (freq) fftw_free(freq);
  }
};

KernelOp::KernelOp() = default;
KernelOp::~KernelOp() = default;
KernelOp::KernelOp(KernelOp&&) noexcept = default;
KernelOp& KernelOp::operator=(KernelOp&&) noexcept = default;

KernelKind KernelOp::kind() const { return impl_->kind; }
double KernelOp::sigma() const { return impl_->sigma; }

KernelOp make_kernel_op(const Grid& grid, double sigma, KernelKind kind) {
  KernelOp op;
  op.impl_ = std::make_unique<KernelOp::Impl>();
  KernelOp::Impl& im = *op.impl_;
  im.grid = grid;
  im.kind = kind;
  im.sigma = sigma;
  if (kind == KernelKind::identity) return op;
  if (!(sigma > 0.0)) throw std::invalid_argument("kernel sigma must be > 0");

  // Linear convolution needs room for offsets -(n-1)..(n-1) on each axis.
  im.lx = next_fast_size(2 * grid.nx - 1);
  im.ly = next_fast_size(2 * grid.ny - 1);
  // r2c with dims (ly, lx) halves the last (x) axis: ly rows of lx/2+1 bins.
  const int nfreq = (im.lx / 2 + 1) * im.ly;
  im.pad = fftw_alloc_real(static_cast<size_t>(im.lx) * im.ly);
  im.freq = fftw_alloc_complex(static_cast<size_t>(nfreq));
  // Row-major FFTW layout: the slowest dimension first; we use (y, x) so the
  // x index is contiguous, matching the field layout.
  im.fwd = fftw_plan_dft_r2c_2d(im.ly, im.lx, im.pad, im.freq, FFTW_ESTIMATE);
  im.inv = fftw_plan_dft_c2r_2d(im.ly, im.lx, im.freq, im.pad, FFTW_ESTIMATE);
  if (!im.fwd || !im.inv) throw std::runtime_error("fftw plan failed");

  // Kernel samples on the pixel-offset lattice, wrapped so negative offsets
  // land at the top end of the padded array.
  const double area = grid.cell_area();
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  std::memset(im.pad, 0, sizeof(double) * im.lx * im.ly);
  for (int oy = -(grid.ny - 1); oy <= grid.ny - 1; ++oy) {
    const int wy = oy >= 0 ? oy : oy + im.ly;
    const double ry = oy * grid.dy;
    for (int ox = -(grid.nx - 1); ox <= grid.nx - 1; ++ox) {
      const int wx = ox >= 0 ? ox : ox + im.lx;
      const double rx = ox * grid.dx;
      im.pad[static_cast<size_t>(wy) * im.lx + wx] =
          std::exp(-(rx * rx + ry * ry) * inv2s2) * area;
    }
  }
  fftw_execute(im.fwd);
  im.khat.resize(static_cast<size_t>(nfreq));
  const double norm = 1.0 / (static_cast<double>(im.lx) * im.ly);
  for (int k = 0; k < nfreq; ++k)
    im.khat[static_cast<size_t>(k)] =
        std::complex<double>(im.freq[k][0], im.freq[k][1]) * norm;
  return op;
}

ScalarField KernelOp::apply(const ScalarField& u) const {
  const Impl& im = *impl_;
  if (im.kind == KernelKind::identity) return u;
  if (!u.grid.same_shape(im.grid))
    throw std::invalid_argument("kernel grid mismatch");
  std::memset(im.pad, 0, sizeof(double) * im.lx * im.ly);
  for (int j = 0; j < im.grid.ny; ++j)
    std::memcpy(im.pad + static_cast<size_t>(j) * im.lx,
                u.v.data() + static_cast<size_t>(j) * im.grid.nx,
                sizeof(double) * im.grid.nx);
  fftw_execute(im.fwd);
  const int nfreq = (im.lx / 2 + 1) * im.ly;
  for (int k = 0; k < nfreq; ++k) {
    std::complex<double> c(im.freq[k][0], im.freq[k][1]);
    c *= im.khat[static_cast<size_t>(k)];
    im.freq[k][0] = c.real();
    im.freq[k][1] = c.imag();
  }
  fftw_execute(im.inv);
  ScalarField out(im.grid);
  for (int j = 0; j < im.grid.ny; ++j)
    std::memcpy(out.v.data() + static_cast<size_t>(j) * im.grid.nx,
                im.pad + static_cast<size_t>(j) * im.lx,
                sizeof(double) * im.grid.nx);
  return out;
}

VectorField KernelOp::apply(const VectorField& u) const {
  if (impl_->kind == KernelKind::identity) return u;
  VectorField out(u.grid);
  ScalarField comp(u.grid);
  comp.v = u.x;
  out.x = apply(comp).v;
  comp.v = u.y;
  out.y = apply(comp).v;
  return out;
}

namespace {

double spectrum_split(const double* data, int nx, int ny, double& high) {
  // One r2c transform; accumulate |F|^2 with the conjugate-symmetric half
  // counted twice except the self-symmetric columns.
  std::vector<double> in(static_cast<size_t>(nx) * ny);
  std::memcpy(in.data(), data, sizeof(double) * in.size());
  const int nxh = nx / 2 + 1;
  std::vector<std::complex<double>> freq(static_cast<size_t>(nxh) * ny);
  fftw_plan plan = fftw_plan_dft_r2c_2d(
      ny, nx, in.data(), reinterpret_cast<fftw_complex*>(freq.data()),
      FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  double total = 0.0;
  high = 0.0;
  for (int q = 0; q < ny; ++q) {
    const int fy = q <= ny / 2 ? q : q - ny;
    const double ry = std::abs(fy) / (0.5 * ny);
    for (int p = 0; p < nxh; ++p) {
      const double rx = p / (0.5 * nx);
      double e = std::norm(freq[static_cast<size_t>(q) * nxh + p]);
      const bool self = (p == 0) || (2 * p == nx);
      if (!self) e *= 2.0;
      total += e;
      if (rx > 0.5 || ry > 0.5) high += e;
    }
  }
  return total;
}

}  // namespace

double highfreq_fraction(const ScalarField& u) {
  double high = 0.0;
  double total = spectrum_split(u.v.data(), u.grid.nx, u.grid.ny, high);
  return total > 0.0 ? high / total : 0.0;
}

double highfreq_fraction(const VectorField& u) {
  double hx = 0.0, hy = 0.0;
  double tx = spectrum_split(u.x.data(), u.grid.nx, u.grid.ny, hx);
  double ty = spectrum_split(u.y.data(), u.grid.nx, u.grid.ny, hy);
  const double total = tx + ty;
  return total > 0.0 ? (hx + hy) / total : 0.0;
}

}  // namespace flowrec
