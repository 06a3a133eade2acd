#include <doctest.h>

#include "cbf/operators.hpp"
#include "cbf/rng.hpp"

using namespace cbf;

namespace {

const Grid g16(16, 2.0 * M_PI);

SpectralField rnd(const Grid& g, std::uint64_t lane, double h = 1.0) {
    return random_divfree_field(g, 0xF00D, rng::Tag::generic, lane, g.n / 3, g.n / 6.0, h);
}

SpectralField transverse_mode(const Grid& g, double amp = 0.4) {
    // single mode with polarization orthogonal to k
    SpectralField u(g);
    u.at(0, 0, g.index_of_wave(2), 0) = cplx(amp, 0.0);
    u.at(0, 0, g.index_of_wave(-2), 0) = cplx(amp, 0.0);
    return u;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("trilinear form") {
    SpectralField u = rnd(g16, 1), v = rnd(g16, 2), w = rnd(g16, 3);
    double su = norm(u, NormKind::V), sv = norm(v, NormKind::V), sw = norm(w, NormKind::V);

    SUBCASE("annihilation b(u,v,v) = 0") {
        CHECK(std::abs(trilinear_b(u, v, v)) <= 1e-11 * su * sv * sv);
    }
    SUBCASE("skew symmetry in the last two slots") {
        CHECK(std::abs(trilinear_b(u, v, w) + trilinear_b(u, w, v)) <= 1e-11 * su * sv * sw);
    }
    SUBCASE("single transverse mode kills the self-advection") {
        SpectralField m = transverse_mode(g16);
        CHECK(std::abs(trilinear_b(m, m, w)) <= 1e-14);
    }
    SUBCASE("grid mismatch") {
        SpectralField other(Grid(32, 2.0 * M_PI));
        CHECK_THROWS(trilinear_b(u, v, other));
    }
}

TEST_CASE("convective term") {
    SUBCASE("single transverse mode maps to zero") {
        SpectralField m = transverse_mode(g16);
        CHECK(norm(convective(m), NormKind::H) <= 1e-14);
    }
    SUBCASE("pairing with the field vanishes") {
        SpectralField u = rnd(g16, 4);
        double scale = norm(u, NormKind::V);
        CHECK(std::abs(inner_product(convective(u), u)) <= 1e-11 * scale * scale * scale);
    }
    SUBCASE("consistent with the trilinear form") {
        SpectralField u = rnd(g16, 5), w = rnd(g16, 6);
        double lhs = inner_product(convective(u), w);
        double rhs = trilinear_b(u, u, w);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
    SUBCASE("output stays divergence-free") {
        SpectralField u = rnd(g16, 7);
        CHECK(divergence_residual(convective(u)) <= 1e-12);
    }
    SUBCASE("dual-norm bound by the two Lebesgue factors, r = 3") {
        auto battery = test_battery(g16, 64);
        for (int i = 0; i < 5; ++i) {
            SpectralField u = rnd(g16, 40 + i, i % 2 ? 0.3 : 1.7);
            double lhs = dual_v_norm_estimate(convective(u), battery);
            double rhs = norm_lp(u, 4.0, 2.0) * norm_lp(u, 4.0, 2.0);  // 2(r+1)/(r-1) = 4 at r = 3
            CHECK(lhs <= rhs * (1.0 + 1e-9));
        }
    }
    SUBCASE("advective pairing bound through interpolation, r = 5") {
        for (int i = 0; i < 5; ++i) {
            SpectralField u1 = rnd(g16, 50 + i), u2 = rnd(g16, 60 + i);
            double lhs = std::abs(inner_product(convective(u1), u2));
            double rhs = std::pow(norm_lp(u1, 6.0, 3.0), 6.0 / 4.0) *
                         std::pow(norm(u1, NormKind::H), 2.0 / 4.0) * norm(u2, NormKind::V);
            CHECK(lhs <= rhs * (1.0 + 1e-9));
        }
    }
    SUBCASE("difference identity against the frozen-advector form") {
        SpectralField u1 = rnd(g16, 70), u2 = rnd(g16, 71);
        SpectralField d = u1 - u2;
        double lhs = inner_product(convective(u1) - convective(u2), d);
        double rhs = -trilinear_b(d, d, u2);
        double scale = norm(d, NormKind::V) * norm(d, NormKind::V) * norm(u2, NormKind::V);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(scale, 1.0));
    }
}

TEST_CASE("damping operator") {
    SUBCASE("zero maps to zero") {
        SpectralField z(g16);
        CHECK(norm(forchheimer(z, 3), NormKind::H) == 0.0);
    }
    SUBCASE("unsupported exponents rejected") {
        SpectralField u = rnd(g16, 8);
        CHECK_THROWS(forchheimer(u, 2));
        CHECK_THROWS(forchheimer(u, 1));
    }
    SUBCASE("pairing equals the Lebesgue norm power") {
        for (int r : {3, 5, 7}) {
            SpectralField u = rnd(g16, 9, 1.3);
            double pairing = inner_product(forchheimer(u, r), u);
            double lr1 = std::pow(norm_lp(u, r + 1, std::max(1.5, (r + 1) / 2.0)), r + 1);
            CHECK(pairing == doctest::Approx(lr1).epsilon(1e-9));
        }
    }
    SUBCASE("degree-r homogeneity") {
        SpectralField u = rnd(g16, 10);
        const double c = 1.7;
        SpectralField a = forchheimer(c * u, 3);
        SpectralField b = forchheimer(u, 3);
        b *= c * c * c;
        a -= b;
        CHECK(norm(a, NormKind::H) <= 1e-12 * norm(b, NormKind::H));
    }
    SUBCASE("output stays divergence-free") {
        SpectralField u = rnd(g16, 11);
        CHECK(divergence_residual(forchheimer(u, 5)) <= 1e-12);
    }
}

TEST_CASE("directional derivative of the damping term") {
    SUBCASE("zero direction") {
        SpectralField u = rnd(g16, 12);
        SpectralField z(g16);
        CHECK(norm(forchheimer_gateaux(u, z, 5), NormKind::H) == 0.0);
    }
    SUBCASE("degree-r homogeneity relation in the field direction") {
        for (int r : {3, 5}) {
            SpectralField u = rnd(g16, 13);
            SpectralField lhs = forchheimer_gateaux(u, u, r);
            SpectralField rhs = forchheimer(u, r);
            rhs *= double(r);
            lhs -= rhs;
            CHECK(norm(lhs, NormKind::H) <= 1e-12 * double(r) * norm(forchheimer(u, r), NormKind::H));
        }
    }
    SUBCASE("second-order agreement with central differences") {
        SpectralField u = rnd(g16, 14), v = rnd(g16, 15);
        SpectralField exact = forchheimer_gateaux(u, v, 3);
        std::vector<double> lx, ly;
        for (double h : {1e-2, 1e-3, 1e-4}) {
            SpectralField up = u, um = u;
            up.add_scaled(v, h);
            um.add_scaled(v, -h);
            SpectralField fd = forchheimer(up, 3) - forchheimer(um, 3);
            fd *= 1.0 / (2.0 * h);
            fd -= exact;
            lx.push_back(std::log(h));
            ly.push_back(std::log(norm(fd, NormKind::H)));
        }
        double slope = fit_slope(lx, ly);
        CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("r below 3 unsupported") {
        SpectralField u = rnd(g16, 16), v = rnd(g16, 17);
        CHECK_THROWS(forchheimer_gateaux(u, v, 1));
    }
}

TEST_CASE("combined operator") {
    SUBCASE("zero maps to zero") {
        CbfParams p(g16, 1.0, 1.0, 3);
        SpectralField z(g16);
        CHECK(norm(g_apply(z, p), NormKind::H) == 0.0);
    }
    SUBCASE("beta = 0 single transverse mode is purely diffusive") {
        CbfParams p(g16, 0.7, 0.0, 3);
        SpectralField m = transverse_mode(g16);
        SpectralField gm = g_apply(m, p);
        SpectralField expect = m;
        expect *= p.mu * g16.lambda1() * 4.0;  // |k|^2 = 4
        gm -= expect;
        CHECK(norm(gm, NormKind::H) <= 1e-13);
    }
    SUBCASE("energy pairing splits into dissipation and damping") {
        for (int r : {3, 5}) {
            CbfParams p(g16, 0.9, 1.4, r);
            SpectralField u = rnd(g16, 18);
            double lhs = inner_product(g_apply(u, p), u);
            double v2 = norm(u, NormKind::V) * norm(u, NormKind::V);
            double lr1 = std::pow(norm_lp(u, r + 1, p.forchheimer_pad()), r + 1);
            CHECK(lhs == doctest::Approx(p.mu * v2 + p.beta * lr1).epsilon(1e-9));
        }
    }
}

TEST_CASE("dissipation-split identity") {
    SUBCASE("zero field") {
        SpectralField z(g16);
        auto p = identity3_residual(z, 3);
        CHECK(p.passed);
        CHECK(p.gap == 0.0);
    }
    SUBCASE("single transverse mode, closed form") {
        SpectralField m = transverse_mode(g16, 0.3);
        auto p = identity3_residual(m, 3, 2.0, 1e-6);
        CHECK(p.passed);
    }
    SUBCASE("random smooth fields at n = 32") {
        Grid g32(32, 2.0 * M_PI);
        for (int r : {3, 5}) {
            SpectralField u = random_divfree_field(g32, 0xBEEF, rng::Tag::generic, r, 8, 3.0, 1.0);
            auto p = identity3_residual(u, r, 2.0, 1e-4);
            CHECK(p.passed);
        }
    }
    SUBCASE("residual shrinks under refinement") {
        Grid g32(32, 2.0 * M_PI);
        Grid g64(64, 2.0 * M_PI);
        SpectralField u = random_divfree_field(g32, 0xBEEF, rng::Tag::generic, 9, 8, 3.0, 1.0);
        auto coarse = identity3_residual(u, 5, 2.0, 1e-4);
        auto fine = identity3_residual(regrid(u, g64), 5, 2.0, 1e-4);
        double rel_coarse = std::abs(coarse.gap) / (coarse.tolerance / 1e-4);
        double rel_fine = std::abs(fine.gap) / (fine.tolerance / 1e-4);
        CHECK(rel_fine <= rel_coarse / 3.0);
    }
}

TEST_CASE("Young constants") {
    CHECK(young_eta1(1.0, 1.0, 5) == doctest::Approx(2.0));
    CHECK(young_eta2(1.0, 1.0, 5) == doctest::Approx(0.125));
    CHECK(young_eta3(1.0, 1.0, 5) == doctest::Approx(0.5));
    CHECK(young_eta4(1.0, 1.0, 5) == doctest::Approx(1.0));
    CHECK(young_eta3(2.0, 0.5, 7) ==
          doctest::Approx((4.0 / 6.0) * std::pow(4.0 / (0.5 * 2.0 * 6.0), 0.5)));
    CHECK_THROWS(young_eta2(1.0, 1.0, 3));
}

TEST_CASE("difference probes") {
    CbfParams p3(g16, 1.0, 1.0, 3);
    CbfParams p5(g16, 1.0, 1.0, 5);

    SUBCASE("equal arguments give zero gap") {
        SpectralField u = rnd(g16, 20);
        auto mo = monotonicity_gap(u, u, p3, DiffProbe::forchheimer_monotone);
        CHECK(mo.gap == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(mo.passed);
        auto fe = monotonicity_gap(u, u, p3, DiffProbe::g_monotone);
        CHECK(fe.rhs == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(fe.passed);
    }
    SUBCASE("critical-case monotonicity needs its precondition") {
        CbfParams weak(g16, 1.0, 0.4, 3);  // 2 beta mu = 0.8
        SpectralField u = rnd(g16, 21), v = rnd(g16, 22);
        CHECK_THROWS(monotonicity_gap(u, v, weak, DiffProbe::g_monotone));
        CHECK_THROWS(monotonicity_gap(u, v, p3, DiffProbe::g_monotone_shifted));
        CHECK_THROWS(monotonicity_gap(u, v, p3, DiffProbe::bilinear_difference_bound));
    }
    SUBCASE("random sweeps stay nonnegative") {
        for (int i = 0; i < 60; ++i) {
            double s1 = i % 3 == 0 ? 0.2 : (i % 3 == 1 ? 1.0 : 4.0);
            SpectralField u1 = rnd(g16, 1000 + 2 * i, s1);
            SpectralField u2 = rnd(g16, 1001 + 2 * i, 1.0);
            CHECK(monotonicity_gap(u1, u2, p3, DiffProbe::forchheimer_monotone).passed);
            CHECK(monotonicity_gap(u1, u2, p5, DiffProbe::g_monotone_shifted).passed);
            CHECK(monotonicity_gap(u1, u2, p3, DiffProbe::g_monotone).passed);
            CHECK(monotonicity_gap(u1, u2, p3, DiffProbe::lp_difference_bound).passed);
            CHECK(monotonicity_gap(u1, u2, p5, DiffProbe::bilinear_difference_bound).passed);
        }
    }
    SUBCASE("report convention: passed iff gap above minus tolerance") {
        SpectralField u1 = rnd(g16, 23), u2 = rnd(g16, 24);
        auto rep = monotonicity_gap(u1, u2, p3, DiffProbe::forchheimer_monotone);
        CHECK(rep.passed == (rep.gap >= -rep.tolerance));
        CHECK(rep.gap == doctest::Approx(rep.rhs - rep.lhs));
    }
}
