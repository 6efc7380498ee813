#pragma once

#include "flowrec/field.hpp"

namespace flowrec {

// Structural similarity with an 11x11 Gaussian window (sigma 1.5),
// stability constants K1 = 0.01, K2 = 0.03, and the dynamic range taken from
// the reference image (max - min). The map is averaged over centers whose
// window lies fully inside the image.
double ssim(const ScalarField& rec, const ScalarField& ref);

// Peak signal-to-noise ratio with the reference maximum as peak; identical
// images give +infinity.
double psnr(const ScalarField& rec, const ScalarField& ref);

// |rec - ref|_2 / |ref|_2.
double nrmse(const ScalarField& rec, const ScalarField& ref);

struct GateMetrics {
  double ssim = 0.0;
  double psnr = 0.0;
  double nrmse = 0.0;
  double mass_rec = 0.0;
  double mass_ref = 0.0;
};

GateMetrics evaluate(const ScalarField& rec, const ScalarField& ref);

}  // namespace flowrec
