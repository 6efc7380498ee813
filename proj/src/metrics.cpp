#include "flowrec/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "flowrec/calculus.hpp"

namespace flowrec {

namespace {

constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

}  // namespace

double ssim(const ScalarField& rec, const ScalarField& ref) {
  if (!rec.grid.same_shape(ref.grid))
    throw std::invalid_argument("ssim: shape mismatch");
  const int nx = rec.grid.nx, ny = rec.grid.ny;
  if (nx < kWin || ny < kWin)
    throw std::invalid_argument("ssim: image smaller than the window");

  double w[kWin][kWin];
  double wsum = 0.0;
  const int r = kWin / 2;
  for (int b = 0; b < kWin; ++b)
    for (int a = 0; a < kWin; ++a) {
      const double d2 = (a - r) * (a - r) + (b - r) * (b - r);
      w[b][a] = std::exp(-d2 / (2.0 * kWinSigma * kWinSigma));
      wsum += w[b][a];
    }
  for (int b = 0; b < kWin; ++b)
    for (int a = 0; a < kWin; ++a) w[b][a] /= wsum;

  double range = max_value(ref) - min_value(ref);
  if (range <= 0.0) range = 1.0;
  const double c1 = (kK1 * range) * (kK1 * range);
  const double c2 = (kK2 * range) * (kK2 * range);

  double acc = 0.0;
  long count = 0;
  for (int j = r; j < ny - r; ++j) {
    for (int i = r; i < nx - r; ++i) {
      double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (int b = 0; b < kWin; ++b) {
        const int jj = j + b - r;
        for (int a = 0; a < kWin; ++a) {
          const double wv = w[b][a];
          const double x = rec.at(i + a - r, jj);
          const double y = ref.at(i + a - r, jj);
          mx += wv * x;
          my += wv * y;
          sxx += wv * x * x;
          syy += wv * y * y;
          sxy += wv * x * y;
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cxy = sxy - mx * my;
      acc += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return acc / count;
}

double psnr(const ScalarField& rec, const ScalarField& ref) {
  if (!rec.grid.same_shape(ref.grid))
    throw std::invalid_argument("psnr: shape mismatch");
  double mse = 0.0;
  for (size_t k = 0; k < rec.v.size(); ++k) {
    const double d = rec.v[k] - ref.v[k];
    mse += d * d;
  }
  mse /= static_cast<double>(rec.v.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = max_value(ref);
  return 10.0 * std::log10(peak * peak / mse);
}

double nrmse(const ScalarField& rec, const ScalarField& ref) {
  if (!rec.grid.same_shape(ref.grid))
    throw std::invalid_argument("nrmse: shape mismatch");
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k < rec.v.size(); ++k) {
    const double d = rec.v[k] - ref.v[k];
    num += d * d;
    den += ref.v[k] * ref.v[k];
  }
  return std::sqrt(num / den);
}

GateMetrics evaluate(const ScalarField& rec, const ScalarField& ref) {
  GateMetrics m;
  m.ssim = ssim(rec, ref);
  m.psnr = psnr(rec, ref);
  m.nrmse = nrmse(rec, ref);
  m.mass_rec = mass(rec);
  m.mass_ref = mass(ref);
  return m;
}

}  // namespace flowrec
