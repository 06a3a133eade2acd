#pragma once

#include "cbf/field.hpp"

namespace cbf {

// Forward synthesis convention: u(x) = sum_k coeff(k) exp(i (2pi/L) k.x).
// transform() is the analysis direction (physical -> spectral) and carries the
// 1/n^3 factor, so Parseval reads  ||u||_H^2 = L^3 * sum_k |coeff(k)|^2.
//
// Transform plans are cached per grid size behind a mutex; executions are
// concurrent-safe on distinct arrays.  pad >= 1 selects the fine-grid size
// M = pad*n (M must come out even); padding inserts zeros above the Nyquist
// band, splitting Nyquist-plane coefficients across +-n/2 so the padded field
// stays real.

SpectralField transform(const PhysicalField& u);
PhysicalField inverse_transform(const SpectralField& u, double pad = 1.0);

// Grid size for a padded evaluation; throws on unsupported (odd) sizes.
int padded_size(const Grid& g, double pad);

// Analysis on a fine grid of size M, truncated back to the coarse grid g.
SpectralField transform_truncate(const PhysicalField& fine, const Grid& g);

// Quadrature of scalar samples on a grid: sum * (L/n)^3.
double quadrature(const std::vector<double>& samples, const Grid& g);

// |grad w|^2 samples of scalar samples w on grid g, by spectral differentiation.
std::vector<double> scalar_gradient_squared(const std::vector<double>& w, const Grid& g);

}  // namespace cbf
