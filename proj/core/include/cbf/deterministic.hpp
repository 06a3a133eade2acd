#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cbf/operators.hpp"
#include "cbf/params.hpp"
#include "cbf/probe.hpp"

namespace cbf {

// Scalar quantities of the energy estimates, one row per time-grid point.
struct EnergyLedger {
    std::vector<double> t;
    std::vector<double> h2;    // ||u||_H^2
    std::vector<double> v2;    // ||u||_V^2
    std::vector<double> lr1;   // ||u||_{L^{r+1}}^{r+1}
    std::vector<double> ah2;   // ||Au||_H^2
    std::vector<double> fu;    // (f, u)

    std::size_t size() const { return t.size(); }
    // Trapezoid integral of one column over [t[a], t[b]].
    double integrate(const std::vector<double>& col, std::size_t a, std::size_t b) const;
};

struct Trajectory {
    std::vector<double> times;          // times with stored states
    std::vector<SpectralField> states;  // sparse, controlled by save_stride
    EnergyLedger ledger;                // every step
    double dt = 0.0;

    const SpectralField& initial() const { return states.front(); }
    const SpectralField& final_state() const { return states.back(); }
};

struct step_size_error : std::runtime_error {
    double admissible_dt;
    explicit step_size_error(double adm)
        : std::runtime_error("time step above the stability bound"), admissible_dt(adm) {}
};

// One step of the exponential-integrating-factor scheme: the stiff term mu*A
// is integrated exactly mode-wise, the remaining terms -B - beta*C + f are
// advanced with two-stage Heun.  Output is projected and dealiased.
// Enforces dt <= 0.5 * min(dx/||u||_inf, 1/(beta ||u||_inf^{r-1})).
SpectralField step(const SpectralField& u, double dt, const CbfParams& params);

struct IntegrateOptions {
    int save_stride = 0;       // 0: store only the initial and final state
    bool check_cfl = true;
    // Transformed-system hooks (used by the stochastic integrator); both the
    // field perturbation z(t) and its drift coefficient enter the stages.
    std::function<SpectralField(std::int64_t)> stage_noise;  // step index -> z at t_j
    double epsilon = 0.0;
    double ou_alpha = 0.0;
    std::int64_t step_offset = 0;  // index of the first step in the noise grid
    // Called after the initial state and after every step; used by the
    // experiment envelopes to accumulate integrands without storing states.
    std::function<void(std::int64_t, double, const SpectralField&)> observer;
};

Trajectory integrate(const SpectralField& x0, double T, double dt, const CbfParams& params,
                     const IntegrateOptions& opts = {});

// Dimensionless forcing strength G = ||f||_H / (mu^2 lambda1).
double grashof(const CbfParams& params);

struct AbsorbingRadii {
    double rho0 = 0.0;     // ||f||_H / (mu lambda1)
    double grashof = 0.0;  // rho0 = mu * G
    double M0 = 0.0;       // chosen H-radius, M0 > rho0
    double M1 = 0.0;       // V-radius for r > 3
    double M2 = 0.0;       // V-radius for r = 3
    double eta3 = 0.0;     // growth constant entering M1
    bool critical = false; // true when r = 3 (M2 applies)
    double v_radius() const { return critical ? M2 : M1; }
};

AbsorbingRadii absorbing_radii(const CbfParams& params, double M0_margin = 1.1);

// Declared discretization slack: relative allowance C_dt * dt^2 * t, with C_dt
// calibrated once from a reference run's energy-equality residual.
struct DiscretizationAllowance {
    double c_dt = 0.0;
    double dt = 0.0;
    double relative(double t) const { return c_dt * dt * dt * t; }
};

// Calibrates C_dt = safety * residual / (dt^2 * T) from a forced reference run.
DiscretizationAllowance calibrate_allowance(const CbfParams& params, double dt, double T,
                                            std::uint64_t seed, double safety = 8.0);

struct EnvelopeCheckResult {
    OperatorProbeReport envelope;  // sup_t violation of the decay envelope
    double entry_time = -1.0;      // first time ||u||_H <= M0 (never exits after)
    bool absorbed = false;         // inside the M0 ball over the trailing window
};

// ||u(t)||_H^2 <= ||x||_H^2 e^{-mu lambda1 t} + rho0^2 (1 - e^{-mu lambda1 t})
// + allowance, at every ledger time; plus entered-and-stayed detection over a
// trailing window of length 5/(mu lambda1).
EnvelopeCheckResult gronwall_envelope_check(const Trajectory& traj, const CbfParams& params,
                                            const AbsorbingRadii& radii,
                                            const DiscretizationAllowance& allowance);

struct TimeAverageReport {
    double avg_v2 = 0.0, bound_v2 = 0.0;      // (1/T) int ||u||_V^2 vs ||f||^2/(mu^2 lambda1)
    double avg_lr1 = 0.0, bound_lr1 = 0.0;    // vs ||f||^2/(beta mu lambda1)
    double avg_ah2 = 0.0, bound_ah2 = 0.0;    // vs (eta3/(lambda1 mu)+1) 2||f||^2/mu
    bool v2_ok = false, lr1_ok = false, ah2_ok = false;
};

TimeAverageReport time_average_report(const Trajectory& traj, const CbfParams& params, double t_begin,
                                      double t_end, double slack = 0.05);

// Max over ledger times of the relative defect in
// ||u(t)||^2 + 2mu int ||u||_V^2 + 2beta int ||u||_{r+1}^{r+1} = ||x||^2 + 2 int (f,u).
double energy_equality_residual(const Trajectory& traj, const CbfParams& params);

}  // namespace cbf
