#include "cbf/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace cbf {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;  // sign -1 (analysis, unnormalized)
    fftw_plan bwd = nullptr;  // sign +1 (synthesis, unnormalized)
};

// Plan creation is not thread-safe in FFTW; executions on distinct arrays are.
class PlanCache {
public:
    static PlanPair get(int n) {
        static PlanCache cache;
        std::lock_guard<std::mutex> lock(cache.mu_);
        auto it = cache.plans_.find(n);
        if (it != cache.plans_.end()) return it->second;
        std::vector<cplx> scratch(std::size_t(n) * n * n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        PlanPair pp;
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;  // ESTIMATE keeps plans deterministic
        pp.fwd = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD, flags);
        pp.bwd = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD, flags);
        cache.plans_[n] = pp;
        return pp;
    }

private:
    std::mutex mu_;
    std::map<int, PlanPair> plans_;
};

void execute(fftw_plan plan, cplx* inout) {
    auto* p = reinterpret_cast<fftw_complex*>(inout);
    fftw_execute_dft(plan, p, p);
}

// Scatter a coarse-grid coefficient cube into a fine cube of size M >= n.
// Nyquist-plane entries (wavenumber n/2) are split evenly across +-n/2 on the
// fine grid so the synthesized field stays real.
void embed(const Grid& g, const cplx* coarse, int M, cplx* fine) {
    const int n = g.n;
    std::fill(fine, fine + std::int64_t(M) * M * M, cplx(0.0, 0.0));
    auto fine_index = [M](int k) { return k >= 0 ? k : k + M; };
    for (int i = 0; i < n; ++i) {
        int ki = g.wave(i);
        for (int j = 0; j < n; ++j) {
            int kj = g.wave(j);
            for (int l = 0; l < n; ++l) {
                int kl = g.wave(l);
                cplx v = coarse[g.flat(i, j, l)];
                if (v == cplx(0.0, 0.0)) continue;
                int si[2] = {ki, ki}, sj[2] = {kj, kj}, sl[2] = {kl, kl};
                int ci = 1, cj = 1, cl = 1;
                if (M > n) {
                    if (ki == n / 2) { si[1] = -n / 2; ci = 2; }
                    if (kj == n / 2) { sj[1] = -n / 2; cj = 2; }
                    if (kl == n / 2) { sl[1] = -n / 2; cl = 2; }
                }
                cplx w = v / double(ci * cj * cl);
                for (int a = 0; a < ci; ++a)
                    for (int b = 0; b < cj; ++b)
                        for (int c = 0; c < cl; ++c) {
                            std::int64_t idx =
                                (std::int64_t(fine_index(si[a])) * M + fine_index(sj[b])) * M + fine_index(sl[c]);
                            fine[idx] += w;
                        }
            }
        }
    }
}

// Adjoint of embed: gather fine-grid coefficients back onto the coarse cube.
void extract(const Grid& g, const cplx* fine, int M, cplx* coarse) {
    const int n = g.n;
    auto fine_index = [M](int k) { return k >= 0 ? k : k + M; };
    for (int i = 0; i < n; ++i) {
        int ki = g.wave(i);
        for (int j = 0; j < n; ++j) {
            int kj = g.wave(j);
            for (int l = 0; l < n; ++l) {
                int kl = g.wave(l);
                int si[2] = {ki, ki}, sj[2] = {kj, kj}, sl[2] = {kl, kl};
                int ci = 1, cj = 1, cl = 1;
                if (M > n) {
                    if (ki == n / 2) { si[1] = -n / 2; ci = 2; }
                    if (kj == n / 2) { sj[1] = -n / 2; cj = 2; }
                    if (kl == n / 2) { sl[1] = -n / 2; cl = 2; }
                }
                cplx acc(0.0, 0.0);
                for (int a = 0; a < ci; ++a)
                    for (int b = 0; b < cj; ++b)
                        for (int c = 0; c < cl; ++c) {
                            std::int64_t idx =
                                (std::int64_t(fine_index(si[a])) * M + fine_index(sj[b])) * M + fine_index(sl[c]);
                            acc += fine[idx];
                        }
                coarse[g.flat(i, j, l)] = acc;
            }
        }
    }
}

}  // namespace

int padded_size(const Grid& g, double pad) {
    if (pad < 1.0) throw std::invalid_argument("padded_size: pad factor must be >= 1");
    double m = pad * g.n;
    int M = int(std::lround(m));
    if (std::abs(m - M) > 1e-9 || M % 2 != 0)
        throw std::invalid_argument("padded_size: pad*n must be an even integer grid size");
    return M;
}

SpectralField transform(const PhysicalField& u) {
    const Grid& g = u.grid();
    SpectralField out(g);
    const double inv = 1.0 / double(g.points());
    PlanPair plans = PlanCache::get(g.n);
    std::vector<cplx> buf(g.points());
    for (int c = 0; c < 3; ++c) {
        const double* src = u.component(c);
        for (std::int64_t m = 0; m < g.points(); ++m) buf[m] = cplx(src[m], 0.0);
        execute(plans.fwd, buf.data());
        cplx* dst = out.component(c);
        for (std::int64_t m = 0; m < g.points(); ++m) dst[m] = buf[m] * inv;
    }
    return out;
}

PhysicalField inverse_transform(const SpectralField& u, double pad) {
    const Grid& g = u.grid();
    const int M = padded_size(g, pad);
    Grid fine_grid(M, g.L);
    PhysicalField out(fine_grid);
    PlanPair plans = PlanCache::get(M);
    std::vector<cplx> buf(fine_grid.points());
    for (int c = 0; c < 3; ++c) {
        if (M == g.n) {
            const cplx* src = u.component(c);
            std::copy(src, src + g.points(), buf.begin());
        } else {
            embed(g, u.component(c), M, buf.data());
        }
        execute(plans.bwd, buf.data());
        double* dst = out.component(c);
        for (std::int64_t m = 0; m < fine_grid.points(); ++m) dst[m] = buf[m].real();
    }
    return out;
}

SpectralField transform_truncate(const PhysicalField& fine, const Grid& g) {
    const Grid& fg = fine.grid();
    if (fg.n < g.n || fg.L != g.L)
        throw std::invalid_argument("transform_truncate: fine grid incompatible with target");
    const int M = fg.n;
    SpectralField out(g);
    PlanPair plans = PlanCache::get(M);
    const double inv = 1.0 / double(fg.points());
    std::vector<cplx> buf(fg.points());
    for (int c = 0; c < 3; ++c) {
        const double* src = fine.component(c);
        for (std::int64_t m = 0; m < fg.points(); ++m) buf[m] = cplx(src[m] * inv, 0.0);
        execute(plans.fwd, buf.data());
        if (M == g.n) {
            std::copy(buf.begin(), buf.end(), out.component(c));
        } else {
            extract(g, buf.data(), M, out.component(c));
        }
    }
    return out;
}

double quadrature(const std::vector<double>& samples, const Grid& g) {
    if (std::int64_t(samples.size()) != g.points())
        throw std::invalid_argument("quadrature: sample count does not match grid");
    double s = 0.0;
    for (double v : samples) s += v;
    return s * g.cell_volume();
}

std::vector<double> scalar_gradient_squared(const std::vector<double>& w, const Grid& g) {
    if (std::int64_t(w.size()) != g.points())
        throw std::invalid_argument("scalar_gradient_squared: sample count does not match grid");
    const int n = g.n;
    const double s = g.scale();
    PlanPair plans = PlanCache::get(n);
    std::vector<cplx> hat(g.points());
    const double inv = 1.0 / double(g.points());
    for (std::int64_t m = 0; m < g.points(); ++m) hat[m] = cplx(w[m] * inv, 0.0);
    execute(plans.fwd, hat.data());
    std::vector<double> out(g.points(), 0.0);
    std::vector<cplx> buf(g.points());
    for (int dir = 0; dir < 3; ++dir) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    int kv[3] = {g.wave(i), g.wave(j), g.wave(l)};
                    buf[g.flat(i, j, l)] = cplx(0.0, s * kv[dir]) * hat[g.flat(i, j, l)];
                }
        execute(plans.bwd, buf.data());
        for (std::int64_t m = 0; m < g.points(); ++m) {
            double d = buf[m].real();
            out[m] += d * d;
        }
    }
    return out;
}

}  // namespace cbf
