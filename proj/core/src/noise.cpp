#include "cbf/noise.hpp"

#include <algorithm>
#include <cmath>

namespace cbf {

namespace {

bool canonical(const std::array<int, 3>& k) {
    if (k[0] != 0) return k[0] > 0;
    if (k[1] != 0) return k[1] > 0;
    return k[2] > 0;
}

}  // namespace

std::array<std::array<double, 3>, 2> polarization_basis(const std::array<int, 3>& k) {
    double kv[3] = {double(k[0]), double(k[1]), double(k[2])};
    double kn = std::sqrt(kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]);
    // axis least aligned with k
    int axis = 0;
    double best = std::abs(kv[0]);
    for (int c = 1; c < 3; ++c)
        if (std::abs(kv[c]) < best) {
            best = std::abs(kv[c]);
            axis = c;
        }
    double a[3] = {0.0, 0.0, 0.0};
    a[axis] = 1.0;
    double e1[3] = {kv[1] * a[2] - kv[2] * a[1], kv[2] * a[0] - kv[0] * a[2], kv[0] * a[1] - kv[1] * a[0]};
    double e1n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (double& x : e1) x /= e1n;
    double e2[3] = {(kv[1] * e1[2] - kv[2] * e1[1]) / kn, (kv[2] * e1[0] - kv[0] * e1[2]) / kn,
                    (kv[0] * e1[1] - kv[1] * e1[0]) / kn};
    return {{{e1[0], e1[1], e1[2]}, {e2[0], e2[1], e2[2]}}};
}

NoiseModel build_noise_model(const Grid& g, double s_exponent, int k_max) {
    if (!(s_exponent > 0.75))
        throw std::invalid_argument(
            "build_noise_model: spectral weights are square-summable only for s > 3/4");
    if (k_max < 1 || 3 * k_max > g.n)
        throw std::invalid_argument("build_noise_model: need 1 <= k_max <= n/3");
    NoiseModel model;
    model.grid = g;
    model.s_exponent = s_exponent;
    model.k_max = k_max;
    const double s2 = g.scale() * g.scale();
    for (int ki = -k_max; ki <= k_max; ++ki)
        for (int kj = -k_max; kj <= k_max; ++kj)
            for (int kl = -k_max; kl <= k_max; ++kl) {
                std::array<int, 3> k = {ki, kj, kl};
                double k2 = double(ki) * ki + double(kj) * kj + double(kl) * kl;
                if (k2 == 0.0 || k2 > double(k_max) * k_max) continue;
                if (!canonical(k)) continue;
                NoiseMode mode;
                mode.k = k;
                mode.lambda = s2 * k2;
                mode.q = std::pow(mode.lambda, -2.0 * (s_exponent + 1.0));
                mode.pol = polarization_basis(k);
                model.modes.push_back(mode);
            }
    return model;
}

std::vector<double> noise_shell_sums(const NoiseModel& model) {
    std::vector<double> sums(model.k_max + 1, 0.0);
    for (const auto& m : model.modes) {
        double kn = std::sqrt(double(m.k[0]) * m.k[0] + double(m.k[1]) * m.k[1] + double(m.k[2]) * m.k[2]);
        int shell = int(std::ceil(kn - 1e-12));
        sums[shell] += 2.0 * m.q * m.lambda * m.lambda;  // both signs of the pair
    }
    return sums;
}

bool shell_decay_ok(const NoiseModel& model) {
    auto sums = noise_shell_sums(model);
    // least-squares slope of log S vs log shell radius, shells >= 4
    int lo = std::min(4, model.k_max);
    std::vector<std::pair<double, double>> pts;
    for (int s = lo; s < int(sums.size()); ++s)
        if (sums[s] > 0.0) pts.push_back({std::log(double(s)), std::log(sums[s])});
    if (pts.size() < 2) {
        // window too short for a fit; fall back to the ratio of the last shells
        if (sums.size() < 3) return true;
        return sums.back() < 0.9 * sums[sums.size() - 2];
    }
    double mx = 0, my = 0;
    for (auto& p : pts) {
        mx += p.first;
        my += p.second;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0, sxy = 0;
    for (auto& p : pts) {
        sxx += (p.first - mx) * (p.first - mx);
        sxy += (p.first - mx) * (p.second - my);
    }
    double slope = sxy / sxx;
    return slope < -1.0;
}

double AmplitudeNorms::x() const { return std::sqrt(v2) + std::sqrt(da2); }

AmplitudeNorms amplitude_norms(const NoiseModel& model, const std::vector<cplx>& amps) {
    AmplitudeNorms out;
    const double vol = model.grid.volume();
    for (std::size_t m = 0; m < model.modes.size(); ++m) {
        double a2 = std::norm(amps[2 * m]) + std::norm(amps[2 * m + 1]);
        double lam = model.modes[m].lambda;
        out.h2 += 2.0 * a2;
        out.v2 += 2.0 * lam * a2;
        out.da2 += 2.0 * lam * lam * a2;
    }
    out.h2 *= vol;
    out.v2 *= vol;
    out.da2 *= vol;
    return out;
}

SpectralField noise_field(const NoiseModel& model, const std::vector<cplx>& amps) {
    const Grid& g = model.grid;
    SpectralField z(g);
    for (std::size_t m = 0; m < model.modes.size(); ++m) {
        const NoiseMode& mode = model.modes[m];
        int i = g.index_of_wave(mode.k[0]);
        int j = g.index_of_wave(mode.k[1]);
        int l = g.index_of_wave(mode.k[2]);
        int mi = g.index_of_wave(-mode.k[0]);
        int mj = g.index_of_wave(-mode.k[1]);
        int ml = g.index_of_wave(-mode.k[2]);
        for (int c = 0; c < 3; ++c) {
            cplx v = amps[2 * m] * mode.pol[0][c] + amps[2 * m + 1] * mode.pol[1][c];
            z.at(c, i, j, l) = v;
            z.at(c, mi, mj, ml) = std::conj(v);
        }
    }
    return z;
}

std::vector<cplx> noise_amplitudes(const NoiseModel& model, const SpectralField& z) {
    const Grid& g = model.grid;
    std::vector<cplx> amps(2 * model.modes.size());
    for (std::size_t m = 0; m < model.modes.size(); ++m) {
        const NoiseMode& mode = model.modes[m];
        int i = g.index_of_wave(mode.k[0]);
        int j = g.index_of_wave(mode.k[1]);
        int l = g.index_of_wave(mode.k[2]);
        for (int p = 0; p < 2; ++p) {
            cplx acc(0.0, 0.0);
            for (int c = 0; c < 3; ++c) acc += z.at(c, i, j, l) * mode.pol[p][c];
            amps[2 * m + p] = acc;
        }
    }
    return amps;
}

std::vector<cplx> ou_stationary_amplitudes(const NoiseModel& model, double mu, double alpha,
                                           std::uint64_t seed, std::int64_t draw_index) {
    std::vector<cplx> amps(2 * model.modes.size());
    for (std::size_t m = 0; m < model.modes.size(); ++m) {
        double var = model.stationary_variance(m, mu, alpha);
        for (int p = 0; p < 2; ++p)
            amps[2 * m + p] = rng::complex_gaussian(seed, rng::Tag::ou_start, 2 * m + p,
                                                    std::uint64_t(draw_index), 0, var);
    }
    return amps;
}

SpectralField ou_stationary_sample(const NoiseModel& model, double mu, double alpha, std::uint64_t seed,
                                   std::int64_t draw_index) {
    return noise_field(model, ou_stationary_amplitudes(model, mu, alpha, seed, draw_index));
}

void ou_step_exact_amplitudes(const NoiseModel& model, std::vector<cplx>& amps, double mu, double alpha,
                              double dt, std::uint64_t seed, std::int64_t target_index) {
    for (std::size_t m = 0; m < model.modes.size(); ++m) {
        double theta = mu * model.modes[m].lambda + alpha;
        double decay = std::exp(-theta * dt);
        double var = model.modes[m].q * (1.0 - decay * decay) / (2.0 * theta);
        for (int p = 0; p < 2; ++p) {
            cplx xi = rng::complex_gaussian(seed, rng::Tag::ou_step, 2 * m + p,
                                            std::uint64_t(target_index), 0, var);
            amps[2 * m + p] = decay * amps[2 * m + p] + xi;
        }
    }
}

SpectralField ou_step_exact(const SpectralField& z, double dt, const NoiseModel& model, double mu,
                            double alpha, std::uint64_t seed, std::int64_t target_index) {
    if (!(dt > 0.0)) throw std::invalid_argument("ou_step_exact: dt must be positive");
    std::vector<cplx> amps = noise_amplitudes(model, z);
    ou_step_exact_amplitudes(model, amps, mu, alpha, dt, seed, target_index);
    return noise_field(model, amps);
}

OuPath::OuPath(const NoiseModel& model, double mu, double alpha, double dt, double t_min, double t_max,
               std::uint64_t seed)
    : model_(&model), mu_(mu), alpha_(alpha), dt_(dt), seed_(seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("OuPath: dt must be positive");
    if (!(t_min <= 0.0 && 0.0 <= t_max)) throw std::invalid_argument("OuPath: need t_min <= 0 <= t_max");
    j_min_ = std::int64_t(std::floor(t_min / dt - 1e-9));
    j_max_ = std::int64_t(std::ceil(t_max / dt + 1e-9));
    snapped_ = std::abs(j_min_ * dt - t_min) > 1e-9 || std::abs(j_max_ * dt - t_max) > 1e-9;
    amps_.reserve(std::size_t(j_max_ - j_min_ + 1));
    std::vector<cplx> cur = ou_stationary_amplitudes(model, mu, alpha, seed, j_min_);
    amps_.push_back(cur);
    for (std::int64_t j = j_min_ + 1; j <= j_max_; ++j) {
        ou_step_exact_amplitudes(model, cur, mu, alpha, dt, seed, j);
        amps_.push_back(cur);
    }
}

const std::vector<cplx>& OuPath::amplitudes_at(std::int64_t j) const {
    if (j < j_min_ || j > j_max_) throw std::out_of_range("OuPath: time index outside the window");
    return amps_[std::size_t(j - j_min_)];
}

SpectralField OuPath::field_at(std::int64_t j) const { return noise_field(*model_, amplitudes_at(j)); }

AmplitudeNorms OuPath::norms_at(std::int64_t j) const {
    return amplitude_norms(*model_, amplitudes_at(j));
}

double ensemble_mean_x4(const NoiseModel& model, double mu, double alpha, std::uint64_t seed,
                        int samples) {
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
        auto amps = ou_stationary_amplitudes(model, mu, alpha, seed, s);
        double x = amplitude_norms(model, amps).x();
        acc += x * x * x * x;
    }
    return acc / samples;
}

AlphaSearchResult alpha_bound_search(const NoiseModel& model, double mu, double target,
                                     std::uint64_t seed, int samples) {
    if (!(target > 0.0)) throw std::invalid_argument("alpha_bound_search: target must be positive");
    AlphaSearchResult res;
    double alpha = 0.0;
    while (true) {
        double est = ensemble_mean_x4(model, mu, alpha, seed, samples);
        res.trace.push_back({alpha, est});
        if (est <= target) {
            res.alpha0 = alpha;
            res.estimate = est;
            return res;
        }
        alpha = alpha == 0.0 ? 1.0 : 2.0 * alpha;
        if (alpha > std::ldexp(1.0, 64))
            throw std::runtime_error("alpha_bound_search: target unreachable within alpha <= 2^64");
    }
}

double path_time_average_x4(const OuPath& path, double T) {
    std::int64_t steps = std::llround(T / path.dt());
    if (steps < 1 || -steps < path.j_min())
        throw std::out_of_range("path_time_average_x4: window not covered by the path");
    double acc = 0.0;
    double prev = 0.0;
    for (std::int64_t j = -steps; j <= 0; ++j) {
        double x = path.norms_at(j).x();
        double x4 = x * x * x * x;
        if (j > -steps) acc += 0.5 * (prev + x4) * path.dt();
        prev = x4;
    }
    return acc / (steps * path.dt());
}

double moment_bound_onset(const OuPath& path) {
    const double lam1 = path.model().grid.lambda1();
    const double mu = path.mu();
    const double c = 216.0 / (mu * mu * mu);
    // cumulative integral of ||z||_V^4 over [-t, 0], walking backwards
    const std::int64_t extent = -path.j_min();
    std::vector<char> ok(std::size_t(extent) + 1, 1);
    double integral = 0.0;
    double v2 = path.norms_at(0).v2;
    double prev_v4 = v2 * v2;
    for (std::int64_t m = 1; m <= extent; ++m) {
        double w2 = path.norms_at(-m).v2;
        double v4 = w2 * w2;
        integral += 0.5 * (prev_v4 + v4) * path.dt();
        prev_v4 = v4;
        ok[std::size_t(m)] = c * integral <= 0.5 * mu * lam1 * (m * path.dt()) ? 1 : 0;
    }
    std::int64_t last_bad = 0;
    for (std::int64_t m = extent; m >= 1; --m)
        if (!ok[std::size_t(m)]) {
            last_bad = m;
            break;
        }
    if (last_bad == extent) return -1.0;  // still violated at the window edge
    return (last_bad + 1) * path.dt();
}

Trajectory integrate_transformed(const SpectralField& v0, const OuPath& path, double epsilon,
                                 double t_start, double T, double dt, const CbfParams& params,
                                 const IntegrateOptions& opts) {
    if (std::abs(path.dt() - dt) > 1e-12 * std::max(1.0, dt))
        throw std::invalid_argument("integrate_transformed: path resolution must equal dt");
    std::int64_t j0 = std::llround(t_start / dt);
    if (std::abs(j0 * dt - t_start) > 1e-9)
        throw std::invalid_argument("integrate_transformed: t_start must sit on the path grid");
    std::int64_t steps = std::llround(T / dt);
    if (j0 < path.j_min() || j0 + steps > path.j_max())
        throw std::out_of_range("integrate_transformed: path window too short for the run");

    IntegrateOptions o = opts;
    o.epsilon = epsilon;
    o.ou_alpha = path.alpha();
    o.step_offset = j0;
    if (epsilon != 0.0)
        o.stage_noise = [&path](std::int64_t j) { return path.field_at(j); };
    return integrate(v0, T, dt, params, o);
}

}  // namespace cbf
