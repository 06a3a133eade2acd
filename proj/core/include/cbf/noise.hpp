#pragma once

#include <array>
#include <vector>

#include "cbf/deterministic.hpp"
#include "cbf/params.hpp"
#include "cbf/rng.hpp"

namespace cbf {

// One retained wavevector of the spectral noise basis with its two
// divergence-free polarization directions.  Only the canonical half of each
// {k, -k} pair is stored; the conjugate side is implied by realness.
struct NoiseMode {
    std::array<int, 3> k;
    double lambda = 0.0;  // Stokes eigenvalue (2pi/L)^2 |k|^2
    double q = 0.0;       // weight lambda^{-2(s+1)}
    std::array<std::array<double, 3>, 2> pol;
};

// Finite truncation of the cylindrical Wiener process: all wavevectors with
// 0 < |k| <= k_max, weights q_k = lambda_k^{-2(s+1)}.  The decay condition
// s > 3/4 is the summability gate for the weights.
struct NoiseModel {
    Grid grid;
    double s_exponent = 1.0;
    int k_max = 0;
    std::vector<NoiseMode> modes;  // canonical representatives

    std::size_t retained_count() const { return 2 * modes.size(); }
    double stationary_variance(std::size_t m, double mu, double alpha) const {
        return modes[m].q / (2.0 * (mu * modes[m].lambda + alpha));
    }
};

NoiseModel build_noise_model(const Grid& g, double s_exponent, int k_max);

// Orthonormal pair spanning the plane orthogonal to k.
std::array<std::array<double, 3>, 2> polarization_basis(const std::array<int, 3>& k);

// Shell sums of q_k lambda_k^2 by integer radius; the log-log slope beyond
// |k| = 4 must fall below -1, the finite stand-in for the summability of the
// weights (slope 2 - 4s < -1 exactly when s > 3/4).
std::vector<double> noise_shell_sums(const NoiseModel& model);
bool shell_decay_ok(const NoiseModel& model);

struct AmplitudeNorms {
    double h2 = 0.0, v2 = 0.0, da2 = 0.0;
    double x() const;  // ||.||_V + ||A.||_H
};

// Norms of the field spanned by per-mode polarization amplitudes (two complex
// numbers per canonical mode), without materializing the field.
AmplitudeNorms amplitude_norms(const NoiseModel& model, const std::vector<cplx>& amps);

// Field synthesis from amplitudes (Hermitian pair filled from the canonical side).
SpectralField noise_field(const NoiseModel& model, const std::vector<cplx>& amps);
// Adjoint read-off: amplitudes of the retained modes of a field.
std::vector<cplx> noise_amplitudes(const NoiseModel& model, const SpectralField& z);

// Stationary law: each amplitude complex-Gaussian with variance
// q_k / (2 (mu lambda_k + alpha)).  draw_index selects the substream.
std::vector<cplx> ou_stationary_amplitudes(const NoiseModel& model, double mu, double alpha,
                                           std::uint64_t seed, std::int64_t draw_index);
SpectralField ou_stationary_sample(const NoiseModel& model, double mu, double alpha, std::uint64_t seed,
                                   std::int64_t draw_index);

// Exact one-step update z <- e^{-theta dt} z + xi, theta = mu lambda + alpha,
// Var xi = q (1 - e^{-2 theta dt}) / (2 theta).  The standard draws are
// addressed by (mode, polarization, step index) and do not depend on alpha,
// so paths with different alpha share their driving increments.
void ou_step_exact_amplitudes(const NoiseModel& model, std::vector<cplx>& amps, double mu, double alpha,
                              double dt, std::uint64_t seed, std::int64_t target_index);
SpectralField ou_step_exact(const SpectralField& z, double dt, const NoiseModel& model, double mu,
                            double alpha, std::uint64_t seed, std::int64_t target_index);

// Two-sided stationary OU realization on a uniform grid t = j*dt,
// j in [j_min, j_max].  Frozen-omega contract: everything is a pure function
// of (model, mu, alpha, dt, seed).
class OuPath {
public:
    OuPath(const NoiseModel& model, double mu, double alpha, double dt, double t_min, double t_max,
           std::uint64_t seed);

    const NoiseModel& model() const { return *model_; }
    double mu() const { return mu_; }
    double alpha() const { return alpha_; }
    double dt() const { return dt_; }
    std::uint64_t seed() const { return seed_; }
    std::int64_t j_min() const { return j_min_; }
    std::int64_t j_max() const { return j_max_; }
    double t_min() const { return j_min_ * dt_; }
    double t_max() const { return j_max_ * dt_; }
    bool snapped() const { return snapped_; }

    const std::vector<cplx>& amplitudes_at(std::int64_t j) const;
    SpectralField field_at(std::int64_t j) const;
    AmplitudeNorms norms_at(std::int64_t j) const;

private:
    const NoiseModel* model_;
    double mu_, alpha_, dt_;
    std::int64_t j_min_, j_max_;
    std::uint64_t seed_;
    bool snapped_ = false;
    std::vector<std::vector<cplx>> amps_;
};

// theta_s reindexing: value at step j equals the base path at j + shift.
struct ShiftedPath {
    const OuPath* base = nullptr;
    std::int64_t shift_steps = 0;
    SpectralField field_at(std::int64_t j) const { return base->field_at(j + shift_steps); }
};

// Smallest alpha on the doubling grid {0, 1, 2, 4, ...} whose Monte-Carlo
// estimate of E ||z_alpha(0)||_X^4 falls at or below `target`.
struct AlphaSearchResult {
    double alpha0 = 0.0;
    double estimate = 0.0;
    std::vector<std::pair<double, double>> trace;  // (alpha, estimate) along the grid
};
AlphaSearchResult alpha_bound_search(const NoiseModel& model, double mu, double target,
                                     std::uint64_t seed, int samples = 10000);

double ensemble_mean_x4(const NoiseModel& model, double mu, double alpha, std::uint64_t seed,
                        int samples);

// (1/T) integral_{-T}^0 ||z||_X^4 dt over the path grid (trapezoid).
double path_time_average_x4(const OuPath& path, double T);

// Smallest grid time t0 >= 0 such that
// (216/mu^3) int_{-t}^0 ||z||_V^4 <= mu lambda1 t / 2 for every grid t >= t0;
// negative when no such time exists within the path window.
double moment_bound_onset(const OuPath& path);

// Integrates dv/dt = -mu A v - B(v + eps z) - beta C(v + eps z)
// + eps alpha z + f over [t_start, t_start + T]; the path grid must align
// with the integration grid.  eps = 0 reduces bit-exactly to `integrate`.
Trajectory integrate_transformed(const SpectralField& v0, const OuPath& path, double epsilon,
                                 double t_start, double T, double dt, const CbfParams& params,
                                 const IntegrateOptions& opts = {});

}  // namespace cbf
