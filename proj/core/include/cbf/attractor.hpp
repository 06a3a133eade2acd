#pragma once

#include <array>

#include "cbf/cloud.hpp"
#include "cbf/noise.hpp"

namespace cbf {

// Envelope-derived time for a trajectory started at ||x||_H = from_h_norm to
// settle into the M0 ball; floored at 5/(mu lambda1).
double absorption_time_estimate(const CbfParams& params, const AbsorbingRadii& radii,
                                double from_h_norm);

// Random states inside the H-ball of radius `radius`, seeded.
PointCloud ball_cloud(const CbfParams& params, double radius, int count, std::uint64_t seed);

struct AttractorSampleOptions {
    int n_points = 6;
    double burn_in = -1.0;  // < 0: three absorption-time estimates from 10 rho0
    double spacing = -1.0;  // < 0: 1/(mu lambda1)
    int records_per_point = 3;
    double dt = 0.02;
    std::uint64_t seed = 1;
    int threads = 1;
};

// Evolves random M0-ball states past burn-in and collects spaced records;
// the union approximates the global attractor.
PointCloud deterministic_attractor_sample(const CbfParams& params, const AttractorSampleOptions& opts);

// For each x in the cloud: v(-t0) = x - eps z(-t0), integrate the transformed
// system over [-t0, 0], return u(0) = v(0) + eps z(0).  One frozen path for
// all points; eps = 0 reproduces the deterministic flow map bit-exactly.
PointCloud pullback_snapshot(const PointCloud& initial, const OuPath& path, double epsilon, double t0,
                             const CbfParams& params, double dt, int threads = 1);

struct UscReport {
    std::vector<double> epsilons;   // strictly decreasing
    std::vector<double> distances;  // d(A_eps(omega), A) per epsilon
    std::uint64_t seed_omega = 0;
    double t0 = 0.0;
    double deterministic_v_radius = 0.0;  // V-ball radius of the attractor sample
    double stochastic_v_radius = 0.0;     // max V-norm over all pullback states
    bool nonincreasing_ok = false;        // within 10% slack over the grid
    double final_over_first = 0.0;
    bool verdict = false;  // nonincreasing_ok && final < 25% of first
};

struct UscOptions {
    int cloud_size = 6;
    double dt = 0.02;
    double slack = 0.10;
    double final_fraction = 0.25;
    int threads = 1;
    AttractorSampleOptions attractor;
};

UscReport usc_experiment(const std::vector<double>& eps_list, std::uint64_t seed_omega,
                         std::uint64_t seed_init, double t0, const CbfParams& params,
                         const NoiseModel& noise, double ou_alpha, const UscOptions& opts);

struct EpsilonContinuityRow {
    double delta = 0.0;
    double distance = 0.0;       // ||phi_{eps0+delta} x - phi_{eps0} x||_H at t = 0
    double envelope = 0.0;       // Gronwall bound on the same quantity
};

std::vector<EpsilonContinuityRow> epsilon_continuity_experiment(
    double eps0, const std::vector<double>& deltas, std::uint64_t seed, double t0,
    const CbfParams& params, const SpectralField& x, const NoiseModel& noise, double ou_alpha,
    double dt);

// || phi(t+s, omega) x - phi(t, theta_s omega) phi(s, omega) x ||_H.
double cocycle_residual(const SpectralField& x, double t, double s, std::uint64_t seed, double epsilon,
                        const CbfParams& params, const NoiseModel& noise, double ou_alpha, double dt);

struct RdsContinuityRow {
    double delta = 0.0;
    double sup_h = 0.0;     // sup_t ||y(t)||_H
    double int_v2 = 0.0;    // int ||y||_V^2
    double int_lr1 = 0.0;   // int ||y||_{r+1}^{r+1}
    double env_sup2 = 0.0;  // Gronwall bound on sup ||y||_H^2
    double env_intv2 = 0.0; // bound on the dissipation integral
    bool below_envelope = false;
};

// Solution continuity in (x, z, f): perturbs all three by delta along fixed
// unit-norm directions and measures the divergence of the transformed flows.
std::vector<RdsContinuityRow> rds_continuity_experiment(const SpectralField& x,
                                                        const std::vector<double>& deltas,
                                                        std::uint64_t seed, double T, double epsilon,
                                                        const CbfParams& params,
                                                        const NoiseModel& noise, double ou_alpha,
                                                        double dt);

struct KappaReport {
    std::vector<double> horizons;                 // T values
    std::array<std::vector<double>, 6> kappa;     // kappa_i(T)
    std::array<double, 6> rel_change{};           // between the two largest T
};

// The six radius functions with the lower limit -infinity replaced by -T.
KappaReport kappa_report(const OuPath& path, const CbfParams& params, std::vector<double> T_list);

}  // namespace cbf
