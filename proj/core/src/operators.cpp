#include "cbf/operators.hpp"

#include <cmath>

#include "cbf/rng.hpp"

namespace cbf {

namespace {

void check_r(int r) {
    if (r < 3 || r % 2 == 0)
        throw std::invalid_argument("forchheimer exponent r must be an odd integer >= 3");
}

inline double ipow(double x, int m) {
    double y = 1.0;
    while (m-- > 0) y *= x;
    return y;
}

double product_pad(int r) { return std::max(1.5, (r + 1) / 2.0); }

}  // namespace

double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    u.check_same_grid(v);
    u.check_same_grid(w);
    const Grid& g = u.grid();
    SpectralField ut = dealias(u, DealiasRule::two_thirds());
    SpectralField vt = dealias(v, DealiasRule::two_thirds());
    SpectralField wt = dealias(w, DealiasRule::two_thirds());
    PhysicalField up = inverse_transform(ut);
    PhysicalField wp = inverse_transform(wt);
    auto dv = gradient_samples(vt);
    std::vector<double> samples(g.points());
    for (std::int64_t m = 0; m < g.points(); ++m) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            double adv = 0.0;
            for (int j = 0; j < 3; ++j) adv += up.component(j)[m] * dv[i * 3 + j][m];
            acc += adv * wp.component(i)[m];
        }
        samples[m] = acc;
    }
    return quadrature(samples, g);
}

SpectralField convective(const SpectralField& u) {
    const Grid& g = u.grid();
    SpectralField ut = dealias(u, DealiasRule::two_thirds());
    PhysicalField up = inverse_transform(ut);
    auto du = gradient_samples(ut);
    PhysicalField adv(g);
    for (std::int64_t m = 0; m < g.points(); ++m)
        for (int i = 0; i < 3; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j) acc += up.component(j)[m] * du[i * 3 + j][m];
            adv.component(i)[m] = acc;
        }
    SpectralField out = transform_truncate(adv, g);
    dealias_two_thirds_inplace(out);
    leray_project_inplace(out);
    return out;
}

SpectralField forchheimer(const SpectralField& u, int r) {
    check_r(r);
    const Grid& g = u.grid();
    PhysicalField up = inverse_transform(u, product_pad(r));
    const Grid& fg = up.grid();
    const int mexp = (r - 1) / 2;
    PhysicalField prod(fg);
    for (std::int64_t m = 0; m < fg.points(); ++m) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) {
            double x = up.component(c)[m];
            s += x * x;
        }
        double w = ipow(s, mexp);
        for (int c = 0; c < 3; ++c) prod.component(c)[m] = w * up.component(c)[m];
    }
    SpectralField out = transform_truncate(prod, g);
    leray_project_inplace(out);
    return out;
}

SpectralField forchheimer_gateaux(const SpectralField& u, const SpectralField& v, int r) {
    check_r(r);
    u.check_same_grid(v);
    const Grid& g = u.grid();
    double pad = product_pad(r);
    PhysicalField up = inverse_transform(u, pad);
    PhysicalField vp = inverse_transform(v, pad);
    const Grid& fg = up.grid();
    const int m1 = (r - 1) / 2;
    const int m3 = (r - 3) / 2;
    PhysicalField prod(fg);
    for (std::int64_t m = 0; m < fg.points(); ++m) {
        double s = 0.0, udotv = 0.0;
        for (int c = 0; c < 3; ++c) {
            double x = up.component(c)[m];
            s += x * x;
            udotv += x * vp.component(c)[m];
        }
        double w1 = ipow(s, m1);
        double w3 = (r - 1) * ipow(s, m3) * udotv;
        for (int c = 0; c < 3; ++c)
            prod.component(c)[m] = w1 * vp.component(c)[m] + w3 * up.component(c)[m];
    }
    SpectralField out = transform_truncate(prod, g);
    leray_project_inplace(out);
    return out;
}

SpectralField g_apply(const SpectralField& u, const CbfParams& params) {
    SpectralField out = stokes_apply(u);
    out *= params.mu;
    out += convective(u);
    if (params.beta != 0.0) out.add_scaled(forchheimer(u, params.r), params.beta);
    return out;
}

double weighted_h2(const SpectralField& w, const SpectralField& d, int r) {
    check_r(r);
    w.check_same_grid(d);
    double pad = product_pad(r);
    PhysicalField wp = inverse_transform(w, pad);
    PhysicalField dp = inverse_transform(d, pad);
    const Grid& fg = wp.grid();
    const int mexp = (r - 1) / 2;
    std::vector<double> samples(fg.points());
    for (std::int64_t m = 0; m < fg.points(); ++m) {
        double sw = 0.0, sd = 0.0;
        for (int c = 0; c < 3; ++c) {
            double x = wp.component(c)[m];
            double y = dp.component(c)[m];
            sw += x * x;
            sd += y * y;
        }
        samples[m] = ipow(sw, mexp) * sd;
    }
    return quadrature(samples, fg);
}

namespace {

void check_supercritical(int r) {
    if (r <= 3) throw std::domain_error("Young constant defined for r > 3 only");
}

}  // namespace

double young_eta1(double mu, double beta, int r) {
    check_supercritical(r);
    return (r - 3) / (mu * (r - 1)) * std::pow(16.0 / (beta * mu * (r - 1)), 2.0 / (r - 3));
}

double young_eta2(double mu, double beta, int r) {
    check_supercritical(r);
    return (r - 3) / (2.0 * mu * (r - 1)) * std::pow(2.0 / (beta * mu * (r - 1)), 2.0 / (r - 3));
}

double young_eta3(double mu, double beta, int r) {
    check_supercritical(r);
    return double(r - 3) / (r - 1) * std::pow(4.0 / (beta * mu * (r - 1)), 2.0 / (r - 3));
}

double young_eta4(double mu, double beta, int r) {
    check_supercritical(r);
    return (r - 3) / (mu * (r - 1)) * std::pow(8.0 / (beta * mu * (r - 1)), 2.0 / (r - 3));
}

OperatorProbeReport identity3_residual(const SpectralField& u, int r, double pad, double tolerance) {
    check_r(r);
    SpectralField au = stokes_apply(u);
    PhysicalField ap = inverse_transform(au, pad);
    PhysicalField up = inverse_transform(u, pad);
    const Grid& fg = up.grid();
    const int mexp = (r - 1) / 2;

    std::vector<double> lhs_s(fg.points());
    std::vector<double> wcomp(fg.points());
    for (std::int64_t m = 0; m < fg.points(); ++m) {
        double s = 0.0, adotu = 0.0;
        for (int c = 0; c < 3; ++c) {
            double x = up.component(c)[m];
            s += x * x;
            adotu += ap.component(c)[m] * x;
        }
        lhs_s[m] = ipow(s, mexp) * adotu;
        wcomp[m] = std::pow(s, 0.25 * (r + 1));  // |u|^{(r+1)/2}
    }
    double lhs = quadrature(lhs_s, fg);

    auto du = gradient_samples(u, pad);
    std::vector<double> t1_s(fg.points());
    for (std::int64_t m = 0; m < fg.points(); ++m) {
        double grad2 = 0.0;
        for (int a = 0; a < 9; ++a) grad2 += du[a][m] * du[a][m];
        double s = 0.0;
        for (int c = 0; c < 3; ++c) {
            double x = up.component(c)[m];
            s += x * x;
        }
        t1_s[m] = grad2 * ipow(s, mexp);
    }
    double t1 = quadrature(t1_s, fg);

    std::vector<double> gw2 = scalar_gradient_squared(wcomp, fg);
    double t2 = 4.0 * (r - 1) / double((r + 1) * (r + 1)) * quadrature(gw2, fg);

    double scale = std::max({std::abs(lhs), std::abs(t1), std::abs(t2), 1e-300});
    return OperatorProbeReport::identity("gradient_split_identity", lhs, t1 + t2, tolerance * scale);
}

const char* diff_probe_name(DiffProbe which) {
    switch (which) {
        case DiffProbe::forchheimer_monotone: return "forchheimer_monotone";
        case DiffProbe::g_monotone_shifted: return "g_monotone_shifted";
        case DiffProbe::g_monotone: return "g_monotone";
        case DiffProbe::lp_difference_bound: return "lp_difference_bound";
        case DiffProbe::bilinear_difference_bound: return "bilinear_difference_bound";
    }
    return "unknown";
}

OperatorProbeReport monotonicity_gap(const SpectralField& u1, const SpectralField& u2,
                                     const CbfParams& params, DiffProbe which, double rel_tolerance) {
    u1.check_same_grid(u2);
    const int r = params.r;
    SpectralField d = u1 - u2;
    const double dv2 = norm(d, NormKind::V) * norm(d, NormKind::V);
    const double dh2 = norm(d, NormKind::H) * norm(d, NormKind::H);

    switch (which) {
        case DiffProbe::forchheimer_monotone: {
            SpectralField dc = forchheimer(u1, r) - forchheimer(u2, r);
            double pairing = inner_product(dc, d);
            double lhs = 0.5 * weighted_h2(u1, d, r) + 0.5 * weighted_h2(u2, d, r);
            double scale = std::max({std::abs(pairing), lhs, 1e-300});
            return OperatorProbeReport::inequality(diff_probe_name(which), lhs, pairing,
                                                   rel_tolerance * scale);
        }
        case DiffProbe::g_monotone_shifted: {
            if (r <= 3)
                throw std::invalid_argument("g_monotone_shifted probe needs r > 3");
            SpectralField dg = g_apply(u1, params) - g_apply(u2, params);
            double value = inner_product(dg, d) + young_eta2(params.mu, params.beta, r) * dh2;
            double scale = std::max(dv2, 1e-300);
            return OperatorProbeReport::inequality(diff_probe_name(which), 0.0, value,
                                                   rel_tolerance * scale);
        }
        case DiffProbe::g_monotone: {
            if (r != 3 || 2.0 * params.beta * params.mu < 1.0)
                throw std::invalid_argument("g_monotone probe needs r = 3 and 2*beta*mu >= 1");
            SpectralField dg = g_apply(u1, params) - g_apply(u2, params);
            double value = inner_product(dg, d);
            double scale = std::max(dv2, 1e-300);
            return OperatorProbeReport::inequality(diff_probe_name(which), 0.0, value,
                                                   rel_tolerance * scale);
        }
        case DiffProbe::lp_difference_bound: {
            double lhs = std::pow(norm_lp(d, r + 1, params.forchheimer_pad()), r + 1);
            double rhs = std::pow(2.0, r - 2) * (weighted_h2(u1, d, r) + weighted_h2(u2, d, r));
            double scale = std::max({lhs, rhs, 1e-300});
            return OperatorProbeReport::inequality(diff_probe_name(which), lhs, rhs,
                                                   rel_tolerance * scale);
        }
        case DiffProbe::bilinear_difference_bound: {
            if (r <= 3)
                throw std::invalid_argument("bilinear_difference_bound probe needs r > 3");
            double lhs = std::abs(trilinear_b(d, d, u2));
            double rhs = 0.25 * params.mu * dv2 + 0.125 * params.beta * weighted_h2(u2, d, r) +
                         young_eta1(params.mu, params.beta, r) * dh2;
            double scale = std::max({lhs, rhs, 1e-300});
            return OperatorProbeReport::inequality(diff_probe_name(which), lhs, rhs,
                                                   rel_tolerance * scale);
        }
    }
    throw std::logic_error("monotonicity_gap: unhandled probe");
}

std::vector<SpectralField> test_battery(const Grid& g, int count, std::uint64_t seed) {
    std::vector<SpectralField> fields;
    fields.reserve(count);
    for (int i = 0; i < count; ++i) {
        SpectralField w =
            random_divfree_field(g, seed, rng::Tag::test_battery, std::uint64_t(i), g.n / 3, g.n / 6.0, 1.0);
        double v = norm(w, NormKind::V);
        if (v > 0.0) w *= 1.0 / v;
        fields.push_back(std::move(w));
    }
    return fields;
}

double dual_v_norm_estimate(const SpectralField& f, const std::vector<SpectralField>& battery) {
    double best = 0.0;
    for (const auto& w : battery) best = std::max(best, std::abs(inner_product(f, w)));
    return best;
}

}  // namespace cbf
