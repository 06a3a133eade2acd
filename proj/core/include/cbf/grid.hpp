#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cbf {

// Cubic periodic grid on [0, L]^3 with n modes per dimension.
// Wavevectors are integer triples k in {-n/2+1, ..., n/2}^3; the spatial
// frequency of mode k is (2*pi/L)*k.
struct Grid {
    int n = 0;
    double L = 0.0;

    Grid() = default;
    Grid(int n_, double L_) : n(n_), L(L_) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("Grid: n must be even and >= 8");
        if (!(L > 0.0))
            throw std::invalid_argument("Grid: L must be positive");
    }

    double scale() const { return 2.0 * M_PI / L; }  // spatial frequency unit
    double dx() const { return L / n; }
    std::int64_t points() const { return std::int64_t(n) * n * n; }
    double cell_volume() const { return dx() * dx() * dx(); }
    double volume() const { return L * L * L; }

    // Array index (0..n-1) -> signed wavenumber in {-n/2+1, .., n/2}.
    int wave(int i) const { return i <= n / 2 ? i : i - n; }
    // Signed wavenumber -> array index.
    int index_of_wave(int k) const { return k >= 0 ? k : k + n; }

    std::int64_t flat(int i, int j, int l) const {
        return (std::int64_t(i) * n + j) * n + l;
    }

    // Smallest positive eigenvalue of the Stokes operator on this grid.
    double lambda1() const { return scale() * scale(); }
    // Eigenvalue of the Stokes operator at wavevector k.
    double lambda(const std::array<int, 3>& k) const {
        double s2 = scale() * scale();
        return s2 * (double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2]);
    }

    bool operator==(const Grid& o) const { return n == o.n && L == o.L; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace cbf
