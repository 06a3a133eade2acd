#pragma once

#include <vector>

#include "cbf/params.hpp"
#include "cbf/probe.hpp"
#include "cbf/spectral_ops.hpp"

namespace cbf {

// Trilinear form b(u, v, w) = integral (u.grad v).w dx with quadratically
// dealiased products (inputs truncated by the 2/3 rule, quadrature on the
// base grid).
double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w);

// B(u) = P (u.grad) u, dealiased.
SpectralField convective(const SpectralField& u);

// C(u) = P(|u|^{r-1} u); the degree-r product is evaluated on the padded grid.
// r must be an odd integer >= 3.
SpectralField forchheimer(const SpectralField& u, int r);

// Directional derivative of C at u in direction v:
//   P(|u|^{r-1} v) + (r-1) P(u |u|^{r-3} (u.v)).
SpectralField forchheimer_gateaux(const SpectralField& u, const SpectralField& v, int r);

// G(u) = mu A u + B(u) + beta C(u).
SpectralField g_apply(const SpectralField& u, const CbfParams& params);

// Weighted pairing ||  |w|^{(r-1)/2} d ||_H^2 = integral |w|^{r-1} |d|^2 dx
// on the padded grid.
double weighted_h2(const SpectralField& w, const SpectralField& d, int r);

// Young-inequality constants entering the operator-difference estimates;
// defined for r > 3 only.
double young_eta1(double mu, double beta, int r);  // bilinear difference split
double young_eta2(double mu, double beta, int r);  // shift making G monotone
double young_eta3(double mu, double beta, int r);  // gradient-ball growth rate
double young_eta4(double mu, double beta, int r);  // flow-comparison split

// Splits the damping dissipation pairing <-Delta u, |u|^{r-1}u> into its two
// gradient integrals and reports the relative residual.  Meaningful for
// band-limited u well below Nyquist; the residual measures aliasing.
OperatorProbeReport identity3_residual(const SpectralField& u, int r, double pad = 2.0,
                                       double tolerance = 1e-4);

enum class DiffProbe {
    forchheimer_monotone,        // <C(u1)-C(u2), d> >= (W1 + W2)/2
    g_monotone_shifted,          // <G(u1)-G(u2), d> + eta2 ||d||_H^2 >= 0   (r > 3)
    g_monotone,                  // <G(u1)-G(u2), d> >= 0                    (r = 3, 2 beta mu >= 1)
    lp_difference_bound,         // ||d||_{r+1}^{r+1} <= 2^{r-2} (W1 + W2)
    bilinear_difference_bound,   // |<B(d,d), u2>| <= mu/4 ||d||_V^2 + beta/8 W2 + eta1 ||d||_H^2
};

const char* diff_probe_name(DiffProbe which);

OperatorProbeReport monotonicity_gap(const SpectralField& u1, const SpectralField& u2,
                                     const CbfParams& params, DiffProbe which,
                                     double rel_tolerance = 1e-9);

// Fixed randomized battery of unit-V test fields for dual-norm lower bounds.
std::vector<SpectralField> test_battery(const Grid& g, int count = 64, std::uint64_t seed = 0xB477E7);
double dual_v_norm_estimate(const SpectralField& f, const std::vector<SpectralField>& battery);

}  // namespace cbf
