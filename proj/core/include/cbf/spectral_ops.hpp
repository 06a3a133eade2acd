#pragma once

#include "cbf/fft.hpp"
#include "cbf/field.hpp"

namespace cbf {

enum class NormKind { H, V, DA };

// Orthogonal projection onto divergence-free fields:
// result(k) = f(k) - k (k.f(k)) / |k|^2, result(0) = 0.  Idempotent.
SpectralField leray_project(const SpectralField& f);
void leray_project_inplace(SpectralField& f);

// Stokes operator: result(k) = (2pi/L)^2 |k|^2 u(k).
SpectralField stokes_apply(const SpectralField& u);

// L^2 pairing: Re sum_k conj(u_k).v_k * L^3.
double inner_product(const SpectralField& u, const SpectralField& v);

double norm(const SpectralField& u, NormKind kind);
// ||u||_{L^p} by physical-space quadrature on a padded grid (p >= 1).
double norm_lp(const SpectralField& u, double p, double pad = 1.0);
double norm_lp(const PhysicalField& u, double p);

// X-norm used by the noise diagnostics: ||u||_V + ||Au||_H.
double norm_x(const SpectralField& u);

// Largest pointwise velocity magnitude (physical-space sup norm).
double sup_norm(const SpectralField& u);

// Relative divergence residual max_k |k.u_k| / (|k| |u_k|) over modes with u_k != 0.
double divergence_residual(const SpectralField& u);

// Enforce coeff(-k) = conj(coeff(k)) by averaging the pair; zero the mean mode.
void hermitian_symmetrize(SpectralField& u);

struct DealiasRule {
    enum class Kind { two_thirds, padded };
    Kind kind = Kind::two_thirds;
    double pad = 1.5;
    static DealiasRule two_thirds() { return {Kind::two_thirds, 0.0}; }
    static DealiasRule padded(double p) { return {Kind::padded, p}; }
};

// two_thirds zeroes every mode with any |k_i| > n/3; padded is the identity
// in spectral space (the padding happens inside product evaluation).
SpectralField dealias(const SpectralField& u, const DealiasRule& rule);
void dealias_two_thirds_inplace(SpectralField& u);

// Gradient tensor d_j u_i as nine physical-space sample arrays on the padded
// grid, ordered (i, j) row-major.  Used by the convective term and probes.
std::array<std::vector<double>, 9> gradient_samples(const SpectralField& u, double pad = 1.0);

// Same function on another grid with the same period: coefficients are copied
// by wavevector over the shared band (source Nyquist planes are dropped).
SpectralField regrid(const SpectralField& u, const Grid& target);

}  // namespace cbf
