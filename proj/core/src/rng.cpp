#include "cbf/rng.hpp"

#include <cmath>

#include "cbf/spectral_ops.hpp"

namespace cbf {
namespace rng {

namespace {

inline std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double to_unit(std::uint64_t w) {
    // 53 uniform bits, offset by half an ulp so the result is in (0,1)
    return (double(w >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

std::uint64_t bits(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix(seed ^ 0x243f6a8885a308d3ULL);
    h = mix(h ^ std::uint64_t(tag));
    h = mix(h ^ a);
    h = mix(h ^ b);
    h = mix(h ^ c);
    return h;
}

double uniform(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return to_unit(bits(seed, tag, a, b, c));
}

std::pair<double, double> normal_pair(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b,
                                      std::uint64_t c) {
    double u1 = to_unit(bits(seed, tag, a, b, 2 * c));
    double u2 = to_unit(bits(seed, tag, a, b, 2 * c + 1));
    double rho = std::sqrt(-2.0 * std::log(u1));
    return {rho * std::cos(2.0 * M_PI * u2), rho * std::sin(2.0 * M_PI * u2)};
}

cplx complex_gaussian(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                      double var) {
    auto [x, y] = normal_pair(seed, tag, a, b, c);
    double s = std::sqrt(0.5 * var);
    return cplx(s * x, s * y);
}

}  // namespace rng

SpectralField random_divfree_field(const Grid& g, std::uint64_t seed, rng::Tag tag, std::uint64_t lane,
                                   int band, double decay_sigma, double h_norm) {
    if (band < 1 || band > g.n / 2) throw std::invalid_argument("random_divfree_field: bad band limit");
    SpectralField u(g);
    std::uint64_t idx = 0;
    for (int ki = -band; ki <= band; ++ki)
        for (int kj = -band; kj <= band; ++kj)
            for (int kl = -band; kl <= band; ++kl) {
                std::uint64_t my_idx = idx++;
                if (ki == 0 && kj == 0 && kl == 0) continue;
                // canonical representative of the {k, -k} pair
                if (ki < 0 || (ki == 0 && (kj < 0 || (kj == 0 && kl < 0)))) continue;
                double k2 = double(ki) * ki + double(kj) * kj + double(kl) * kl;
                double amp = std::exp(-k2 / (2.0 * decay_sigma * decay_sigma));
                cplx a[3];
                for (int c = 0; c < 3; ++c)
                    a[c] = amp * rng::complex_gaussian(seed, tag, lane, my_idx, c, 1.0);
                // remove the component along k
                cplx kdot = double(ki) * a[0] + double(kj) * a[1] + double(kl) * a[2];
                a[0] -= kdot * double(ki) / k2;
                a[1] -= kdot * double(kj) / k2;
                a[2] -= kdot * double(kl) / k2;
                int i = g.index_of_wave(ki), j = g.index_of_wave(kj), l = g.index_of_wave(kl);
                int mi = g.index_of_wave(-ki), mj = g.index_of_wave(-kj), ml = g.index_of_wave(-kl);
                for (int c = 0; c < 3; ++c) {
                    u.at(c, i, j, l) = a[c];
                    u.at(c, mi, mj, ml) = std::conj(a[c]);
                }
            }
    double h = norm(u, NormKind::H);
    if (h > 0.0 && h_norm > 0.0) u *= h_norm / h;
    return u;
}

}  // namespace cbf
