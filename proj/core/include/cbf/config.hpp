#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/noise.hpp"
#include "cbf/params.hpp"

namespace cbf {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ForcingSpec {
    enum class Kind { zero, single_mode, seeded_random };
    Kind kind = Kind::zero;
    std::array<int, 3> k = {1, 0, 0};
    double amplitude = 0.0;
    int polarization = 0;   // index into the divergence-free pair at k
    int k_max = 3;          // seeded_random band
    double norm = 0.0;      // seeded_random target ||f||_H
};

// Flat key = value configuration (kept deliberately small; see README for the
// schema).  Unknown keys are rejected; soft constraint violations are
// collected in `flags` instead of failing the load.
struct RunConfig {
    int n = 16;
    double L = 2.0 * M_PI;
    double mu = 1.0;
    double alpha = 0.0;  // Darcy coefficient, informational
    double beta = 1.0;
    int r = 3;
    double M0_margin = 1.1;
    ForcingSpec forcing;
    double s_exponent = 1.0;
    int noise_k_max = 0;  // 0: derive n/3
    double alpha_ou = 1.0;
    double epsilon = 0.1;
    double dt = 0.025;
    double T = 10.0;
    double t0 = 50.0;
    std::uint64_t seed_omega = 1;
    std::uint64_t seed_init = 2;
    std::string out_dir = "out";
    int threads = 0;  // 0: hardware concurrency

    std::vector<std::string> flags;  // soft violations, e.g. 2 beta mu < 1 at r = 3
    std::string config_hash;         // hex fingerprint of the source text

    Grid make_grid() const { return Grid(n, L); }
    CbfParams make_params() const;       // includes the forcing field
    NoiseModel make_noise_model() const;
    int effective_threads() const;
    int effective_noise_k_max() const { return noise_k_max > 0 ? noise_k_max : n / 3; }
};

// Parses and validates; throws config_error listing every violation with its
// line number.  Missing keys keep their defaults.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Single-mode forcing field with coefficient `amplitude` on the polarization
// pair at wavevector k (and its conjugate).
SpectralField single_mode_forcing(const Grid& g, const std::array<int, 3>& k, double amplitude,
                                  int polarization);

std::string hash_hex(const std::string& text);

}  // namespace cbf
