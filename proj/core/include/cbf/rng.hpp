#pragma once

#include <cstdint>
#include <utility>

#include "cbf/field.hpp"

namespace cbf {

// Counter-based generator: every draw is a pure function of
// (seed, purpose tag, three index words).  No stream state, so draws remain
// addressable under path shifts, stage-time evaluation, and parallel runs.
namespace rng {

enum class Tag : std::uint64_t {
    init_field = 1,
    forcing = 2,
    ou_start = 3,
    ou_step = 4,
    test_battery = 5,
    cloud = 6,
    generic = 7,
    perturbation = 8,
};

std::uint64_t bits(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Uniform in (0,1), never exactly 0 or 1.
double uniform(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Standard normal pair (Box-Muller on two counter words derived from c).
std::pair<double, double> normal_pair(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b,
                                      std::uint64_t c);

// Complex Gaussian with E|xi|^2 = var.
cplx complex_gaussian(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                      double var);

}  // namespace rng

// Convenience handle carrying (seed, tag) with a running draw index.
class DrawStream {
public:
    DrawStream(std::uint64_t seed, rng::Tag tag, std::uint64_t lane = 0)
        : seed_(seed), tag_(tag), lane_(lane) {}

    double uniform() { return rng::uniform(seed_, tag_, lane_, next_++, 0); }
    double normal() { return rng::normal_pair(seed_, tag_, lane_, next_++, 0).first; }
    cplx complex_gaussian(double var) { return rng::complex_gaussian(seed_, tag_, lane_, next_++, 0, var); }

private:
    std::uint64_t seed_;
    rng::Tag tag_;
    std::uint64_t lane_;
    std::uint64_t next_ = 0;
};

// Divergence-free, zero-mean random field: independent complex-Gaussian
// 3-vectors per canonical wavevector with 0 < |k_i| band limit, projected
// onto the plane orthogonal to k, Hermitian-symmetrized.  Amplitudes carry
// the decay exp(-|k|^2 / (2 sigma^2)); the result is scaled to ||.||_H = h_norm.
SpectralField random_divfree_field(const Grid& g, std::uint64_t seed, rng::Tag tag, std::uint64_t lane,
                                   int band, double decay_sigma, double h_norm);

}  // namespace cbf
