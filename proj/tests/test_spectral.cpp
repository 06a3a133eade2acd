#include <doctest.h>

#include "cbf/rng.hpp"
#include "cbf/spectral_ops.hpp"

using namespace cbf;

namespace {

const Grid g16(16, 2.0 * M_PI);

SpectralField rnd(const Grid& g, std::uint64_t lane, double h = 1.0) {
    return random_divfree_field(g, 0xABCD, rng::Tag::generic, lane, g.n / 3, g.n / 6.0, h);
}

// random Hermitian (not divergence-free) field
SpectralField rnd_hermitian(const Grid& g, std::uint64_t lane) {
    SpectralField u(g);
    DrawStream ds(0x5151, rng::Tag::generic, lane);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int l = 0; l < g.n; ++l) {
                if (std::abs(g.wave(i)) > 4 || std::abs(g.wave(j)) > 4 || std::abs(g.wave(l)) > 4)
                    continue;
                for (int c = 0; c < 3; ++c) u.at(c, i, j, l) = ds.complex_gaussian(1.0);
            }
    hermitian_symmetrize(u);
    return u;
}

}  // namespace

TEST_CASE("grid invariants") {
    CHECK_THROWS(Grid(7, 1.0));
    CHECK_THROWS(Grid(6, 1.0));
    CHECK_THROWS(Grid(16, 0.0));
    Grid g(16, 3.0);
    CHECK(g.wave(0) == 0);
    CHECK(g.wave(8) == 8);
    CHECK(g.wave(9) == -7);
    CHECK(g.index_of_wave(-7) == 9);
    CHECK(g.lambda1() == doctest::Approx((2 * M_PI / 3.0) * (2 * M_PI / 3.0)));
}

TEST_CASE("transform round trip and Parseval") {
    SpectralField u = rnd(g16, 1);
    PhysicalField up = inverse_transform(u);
    SpectralField rt = transform(up);
    rt -= u;
    CHECK(norm(rt, NormKind::H) <= 1e-12 * norm(u, NormKind::H));

    // grid-sum of |u(x)|^2 (L/n)^3 equals the spectral H-norm squared
    std::vector<double> sq(g16.points());
    for (std::int64_t m = 0; m < g16.points(); ++m) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) {
            double x = up.component(c)[m];
            s += x * x;
        }
        sq[m] = s;
    }
    double h2 = norm(u, NormKind::H) * norm(u, NormKind::H);
    CHECK(quadrature(sq, g16) == doctest::Approx(h2).epsilon(1e-12));

    // physical field of a zero-mean spectrum has zero spatial mean
    double mean = 0.0;
    for (std::int64_t m = 0; m < g16.points(); ++m) mean += up.component(0)[m];
    CHECK(std::abs(mean) / g16.points() <= 1e-13);
}

TEST_CASE("single mode round trip is exact") {
    SpectralField u(g16);
    u.at(0, g16.index_of_wave(0), g16.index_of_wave(2), g16.index_of_wave(1)) = cplx(0.3, -0.1);
    u.at(0, g16.index_of_wave(0), g16.index_of_wave(-2), g16.index_of_wave(-1)) = cplx(0.3, 0.1);
    SpectralField rt = transform(inverse_transform(u));
    rt -= u;
    CHECK(norm(rt, NormKind::H) <= 1e-13);
}

TEST_CASE("padded synthesis sizes") {
    CHECK(padded_size(g16, 1.0) == 16);
    CHECK(padded_size(g16, 1.5) == 24);
    CHECK(padded_size(g16, 2.0) == 32);
    CHECK(padded_size(g16, 3.0) == 48);
    CHECK_THROWS(padded_size(g16, 0.5));
    CHECK_THROWS(padded_size(Grid(10, 1.0), 1.3));  // 13 points: odd fine grid rejected
}

TEST_CASE("Leray projection") {
    SUBCASE("gradient fields lie in the kernel") {
        SpectralField grad(g16);
        DrawStream ds(0x77, rng::Tag::generic, 0);
        for (int i = 0; i < g16.n; ++i)
            for (int j = 0; j < g16.n; ++j)
                for (int l = 0; l < g16.n; ++l) {
                    double k[3] = {double(g16.wave(i)), double(g16.wave(j)), double(g16.wave(l))};
                    if (std::abs(k[0]) > 5 || std::abs(k[1]) > 5 || std::abs(k[2]) > 5) continue;
                    cplx phi = ds.complex_gaussian(1.0);
                    for (int c = 0; c < 3; ++c) grad.at(c, i, j, l) = phi * k[c];
                }
        hermitian_symmetrize(grad);
        SpectralField res = leray_project(grad);
        CHECK(norm(res, NormKind::H) <= 1e-12 * std::max(1.0, norm(grad, NormKind::H)));
    }
    SUBCASE("idempotent and exact on divergence-free input") {
        SpectralField u = rnd(g16, 2);
        SpectralField once = leray_project(u);
        SpectralField twice = leray_project(once);
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t m = 0; m < u.raw().size(); ++m) {
            d1 = std::max(d1, std::abs(once.raw()[m] - u.raw()[m]));
            d2 = std::max(d2, std::abs(twice.raw()[m] - once.raw()[m]));
        }
        CHECK(d1 == 0.0);  // P fixes div-free fields bitwise
        CHECK(d2 == 0.0);  // P^2 = P mode-wise
    }
    SUBCASE("random Hermitian input becomes divergence-free") {
        SpectralField u = rnd_hermitian(g16, 3);
        CHECK(divergence_residual(leray_project(u)) <= 1e-12);
    }
    SUBCASE("grid mismatch rejected") {
        SpectralField a = rnd(g16, 4);
        SpectralField b(Grid(32, 2.0 * M_PI));
        CHECK_THROWS(a.check_same_grid(b));
    }
}

TEST_CASE("Stokes operator") {
    SUBCASE("zero maps to zero") {
        SpectralField z(g16);
        CHECK(norm(stokes_apply(z), NormKind::H) == 0.0);
    }
    SUBCASE("single mode at |k| = 1 has eigenvalue (2pi/L)^2") {
        Grid g(16, 3.0);
        SpectralField u(g);
        u.at(1, g.index_of_wave(1), 0, 0) = cplx(0.5, 0.0);
        u.at(1, g.index_of_wave(-1), 0, 0) = cplx(0.5, 0.0);
        SpectralField au = stokes_apply(u);
        au.add_scaled(u, -g.lambda1());
        CHECK(norm(au, NormKind::H) <= 1e-14);
    }
    SUBCASE("pairing <Au,u> equals the V-norm squared") {
        SpectralField u = rnd(g16, 5);
        double v2 = norm(u, NormKind::V) * norm(u, NormKind::V);
        CHECK(inner_product(stokes_apply(u), u) == doctest::Approx(v2).epsilon(1e-10));
    }
    SUBCASE("self-adjoint") {
        SpectralField u = rnd(g16, 6), v = rnd(g16, 7);
        double a = inner_product(stokes_apply(u), v);
        double b = inner_product(u, stokes_apply(v));
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("norms") {
    SUBCASE("zero field") {
        SpectralField z(g16);
        CHECK(norm(z, NormKind::H) == 0.0);
        CHECK(norm(z, NormKind::V) == 0.0);
        CHECK(norm(z, NormKind::DA) == 0.0);
        CHECK(norm_lp(z, 4.0) == 0.0);
    }
    SUBCASE("single mode: V-norm is scale * H-norm") {
        Grid g(16, 5.0);
        SpectralField u(g);
        u.at(2, g.index_of_wave(1), 0, 0) = cplx(0.7, 0.0);
        u.at(2, g.index_of_wave(-1), 0, 0) = cplx(0.7, 0.0);
        CHECK(norm(u, NormKind::V) ==
              doctest::Approx(g.scale() * norm(u, NormKind::H)).epsilon(1e-13));
        CHECK(norm(u, NormKind::DA) ==
              doctest::Approx(g.lambda1() * norm(u, NormKind::H)).epsilon(1e-13));
    }
    SUBCASE("p below 1 rejected") {
        SpectralField u = rnd(g16, 8);
        CHECK_THROWS(norm_lp(u, 0.5));
    }
    SUBCASE("Poincare inequality with the operator lambda1") {
        for (int i = 0; i < 10; ++i) {
            SpectralField u = rnd(g16, 100 + i, 0.1 * (i + 1));
            double h = norm(u, NormKind::H), v = norm(u, NormKind::V);
            CHECK(g16.lambda1() * h * h <= v * v * (1.0 + 1e-12));
        }
    }
    SUBCASE("Ladyzhenskaya bound") {
        for (int i = 0; i < 5; ++i) {
            SpectralField u = rnd(g16, 200 + i);
            double l4 = norm_lp(u, 4.0, 1.5);
            double h = norm(u, NormKind::H), v = norm(u, NormKind::V);
            CHECK(l4 <= std::sqrt(2.0) * std::pow(h, 0.25) * std::pow(v, 0.75) * (1.0 + 1e-9));
        }
    }
    SUBCASE("interpolation between Lebesgue exponents") {
        // 1/s = theta/s1 + (1-theta)/s2 on a shared quadrature grid
        const double triples[][3] = {{2, 3, 6}, {2, 4, 6}, {3, 4, 8}, {2, 2.5, 4}};
        for (auto& t : triples) {
            double s1 = t[0], s = t[1], s2 = t[2];
            double theta = (1.0 / s - 1.0 / s2) / (1.0 / s1 - 1.0 / s2);
            for (int i = 0; i < 3; ++i) {
                SpectralField u = rnd(g16, 300 + i);
                double a = norm_lp(u, s, 2.0);
                double b = std::pow(norm_lp(u, s1, 2.0), theta) *
                           std::pow(norm_lp(u, s2, 2.0), 1.0 - theta);
                CHECK(a <= b * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("dealiasing") {
    SUBCASE("field below the cutoff unchanged") {
        SpectralField u = rnd(g16, 9);  // band n/3 by construction
        SpectralField d = dealias(u, DealiasRule::two_thirds());
        d -= u;
        CHECK(norm(d, NormKind::H) == 0.0);
    }
    SUBCASE("pure high-band field killed") {
        SpectralField u(g16);
        u.at(0, g16.index_of_wave(7), 0, 0) = cplx(1.0, 0.0);
        u.at(0, g16.index_of_wave(-7), 0, 0) = cplx(1.0, 0.0);
        CHECK(norm(dealias(u, DealiasRule::two_thirds()), NormKind::H) == 0.0);
    }
    SUBCASE("padded rule is the spectral identity") {
        SpectralField u = rnd_hermitian(g16, 10);
        SpectralField d = dealias(u, DealiasRule::padded(1.5));
        d -= u;
        CHECK(norm(d, NormKind::H) == 0.0);
    }
    SUBCASE("two-thirds product matches the exact convolution") {
        // scalar product of first components, small grid, O(n^6) oracle
        Grid g(8, 2.0 * M_PI);
        SpectralField u = random_divfree_field(g, 11, rng::Tag::generic, 0, 2, 1.5, 1.0);
        SpectralField v = random_divfree_field(g, 12, rng::Tag::generic, 1, 2, 1.5, 1.0);
        PhysicalField up = inverse_transform(u), vp = inverse_transform(v);
        PhysicalField prod(g);
        for (std::int64_t m = 0; m < g.points(); ++m)
            prod.component(0)[m] = up.component(0)[m] * vp.component(0)[m];
        SpectralField w = transform(prod);
        dealias_two_thirds_inplace(w);

        auto coeff = [&](const SpectralField& f, int c, int k1, int k2, int k3) -> cplx {
            if (std::abs(k1) > g.n / 2 - 1 || std::abs(k2) > g.n / 2 - 1 ||
                std::abs(k3) > g.n / 2 - 1)
                return {0.0, 0.0};
            return f.at(c, g.index_of_wave(k1), g.index_of_wave(k2), g.index_of_wave(k3));
        };
        double worst = 0.0;
        for (int k1 = -2; k1 <= 2; ++k1)
            for (int k2 = -2; k2 <= 2; ++k2)
                for (int k3 = -2; k3 <= 2; ++k3) {
                    cplx acc(0.0, 0.0);
                    for (int a1 = -2; a1 <= 2; ++a1)
                        for (int a2 = -2; a2 <= 2; ++a2)
                            for (int a3 = -2; a3 <= 2; ++a3)
                                acc += coeff(u, 0, a1, a2, a3) *
                                       coeff(v, 0, k1 - a1, k2 - a2, k3 - a3);
                    worst = std::max(worst, std::abs(acc - coeff(w, 0, k1, k2, k3)));
                }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("hermitian symmetrization produces a real field") {
    SpectralField u(g16);
    DrawStream ds(0x99, rng::Tag::generic, 0);
    for (auto& c : u.raw()) c = ds.complex_gaussian(1.0);
    hermitian_symmetrize(u);
    PhysicalField up = inverse_transform(u);
    SpectralField back = transform(up);
    back -= u;
    CHECK(norm(back, NormKind::H) <= 1e-11 * norm(u, NormKind::H));
    for (int c = 0; c < 3; ++c) CHECK(u.at(c, 0, 0, 0) == cplx(0.0, 0.0));
}

TEST_CASE("regrid preserves the shared band") {
    SpectralField u = rnd(g16, 13);
    Grid g32(32, 2.0 * M_PI);
    SpectralField fine = regrid(u, g32);
    CHECK(norm(fine, NormKind::H) == doctest::Approx(norm(u, NormKind::H)).epsilon(1e-14));
    CHECK(norm(fine, NormKind::V) == doctest::Approx(norm(u, NormKind::V)).epsilon(1e-14));
    SpectralField back = regrid(fine, g16);
    back -= u;
    CHECK(norm(back, NormKind::H) == 0.0);
}
