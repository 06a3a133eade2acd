#include "cbf/spectral_ops.hpp"

#include <cmath>

namespace cbf {

SpectralField leray_project(const SpectralField& f) {
    SpectralField out = f;
    leray_project_inplace(out);
    return out;
}

void leray_project_inplace(SpectralField& f) {
    const Grid& g = f.grid();
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
        double ki = g.wave(i);
        for (int j = 0; j < n; ++j) {
            double kj = g.wave(j);
            for (int l = 0; l < n; ++l) {
                double kl = g.wave(l);
                std::int64_t m = g.flat(i, j, l);
                cplx& a0 = f.raw()[m];
                cplx& a1 = f.raw()[m + g.points()];
                cplx& a2 = f.raw()[m + 2 * g.points()];
                double k2 = ki * ki + kj * kj + kl * kl;
                if (k2 == 0.0) {
                    a0 = a1 = a2 = cplx(0.0, 0.0);
                    continue;
                }
                cplx kdot = (ki * a0 + kj * a1 + kl * a2) / k2;
                // skip corrections below round-off so re-projection is a
                // bitwise no-op (idempotence holds exactly)
                double mag2 = std::norm(a0) + std::norm(a1) + std::norm(a2);
                if (std::norm(kdot) * k2 <= 1e-28 * mag2) continue;
                a0 -= kdot * ki;
                a1 -= kdot * kj;
                a2 -= kdot * kl;
            }
        }
    }
}

SpectralField stokes_apply(const SpectralField& u) {
    const Grid& g = u.grid();
    SpectralField out(g);
    const int n = g.n;
    const double s2 = g.scale() * g.scale();
    for (int i = 0; i < n; ++i) {
        double ki = g.wave(i);
        for (int j = 0; j < n; ++j) {
            double kj = g.wave(j);
            for (int l = 0; l < n; ++l) {
                double kl = g.wave(l);
                double lam = s2 * (ki * ki + kj * kj + kl * kl);
                std::int64_t m = g.flat(i, j, l);
                for (int c = 0; c < 3; ++c)
                    out.raw()[m + c * g.points()] = lam * u.raw()[m + c * g.points()];
            }
        }
    }
    return out;
}

double inner_product(const SpectralField& u, const SpectralField& v) {
    u.check_same_grid(v);
    double s = 0.0;
    const auto& a = u.raw();
    const auto& b = v.raw();
    for (std::size_t m = 0; m < a.size(); ++m)
        s += a[m].real() * b[m].real() + a[m].imag() * b[m].imag();
    return s * u.grid().volume();
}

double norm(const SpectralField& u, NormKind kind) {
    const Grid& g = u.grid();
    const int n = g.n;
    const double s2 = g.scale() * g.scale();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double ki = g.wave(i);
        for (int j = 0; j < n; ++j) {
            double kj = g.wave(j);
            for (int l = 0; l < n; ++l) {
                double kl = g.wave(l);
                double lam = s2 * (ki * ki + kj * kj + kl * kl);
                double w = kind == NormKind::H ? 1.0 : (kind == NormKind::V ? lam : lam * lam);
                std::int64_t m = g.flat(i, j, l);
                double mag2 = 0.0;
                for (int c = 0; c < 3; ++c) mag2 += std::norm(u.raw()[m + c * g.points()]);
                acc += w * mag2;
            }
        }
    }
    return std::sqrt(acc * g.volume());
}

double norm_lp(const SpectralField& u, double p, double pad) {
    if (p < 1.0) throw std::invalid_argument("norm_lp: p must be >= 1");
    PhysicalField phys = inverse_transform(u, pad);
    return norm_lp(phys, p);
}

double norm_lp(const PhysicalField& u, double p) {
    if (p < 1.0) throw std::invalid_argument("norm_lp: p must be >= 1");
    const Grid& g = u.grid();
    double acc = 0.0;
    const double* c0 = u.component(0);
    const double* c1 = u.component(1);
    const double* c2 = u.component(2);
    for (std::int64_t m = 0; m < g.points(); ++m) {
        double mag2 = c0[m] * c0[m] + c1[m] * c1[m] + c2[m] * c2[m];
        acc += std::pow(mag2, 0.5 * p);
    }
    return std::pow(acc * g.cell_volume(), 1.0 / p);
}

double norm_x(const SpectralField& u) { return norm(u, NormKind::V) + norm(u, NormKind::DA); }

double sup_norm(const SpectralField& u) {
    PhysicalField phys = inverse_transform(u, 1.0);
    const Grid& g = phys.grid();
    const double* c0 = phys.component(0);
    const double* c1 = phys.component(1);
    const double* c2 = phys.component(2);
    double best = 0.0;
    for (std::int64_t m = 0; m < g.points(); ++m) {
        double mag2 = c0[m] * c0[m] + c1[m] * c1[m] + c2[m] * c2[m];
        if (mag2 > best) best = mag2;
    }
    return std::sqrt(best);
}

double divergence_residual(const SpectralField& u) {
    const Grid& g = u.grid();
    const int n = g.n;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double ki = g.wave(i);
        for (int j = 0; j < n; ++j) {
            double kj = g.wave(j);
            for (int l = 0; l < n; ++l) {
                double kl = g.wave(l);
                double kmag = std::sqrt(ki * ki + kj * kj + kl * kl);
                if (kmag == 0.0) continue;
                std::int64_t m = g.flat(i, j, l);
                cplx a0 = u.raw()[m];
                cplx a1 = u.raw()[m + g.points()];
                cplx a2 = u.raw()[m + 2 * g.points()];
                double amag = std::sqrt(std::norm(a0) + std::norm(a1) + std::norm(a2));
                if (amag == 0.0) continue;
                double div = std::abs(ki * a0 + kj * a1 + kl * a2);
                worst = std::max(worst, div / (kmag * amag));
            }
        }
    }
    return worst;
}

void hermitian_symmetrize(SpectralField& u) {
    const Grid& g = u.grid();
    const int n = g.n;
    // the bin at wavenumber n/2 is its own negative on the lattice
    auto neg_index = [&](int k) { return k == n / 2 ? g.index_of_wave(k) : g.index_of_wave(-k); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                int mi = neg_index(g.wave(i));
                int mj = neg_index(g.wave(j));
                int ml = neg_index(g.wave(l));
                std::int64_t a = g.flat(i, j, l);
                std::int64_t b = g.flat(mi, mj, ml);
                if (a > b) continue;  // each pair handled from its smaller index
                for (int c = 0; c < 3; ++c) {
                    cplx& x = u.raw()[a + c * g.points()];
                    cplx& y = u.raw()[b + c * g.points()];
                    if (a == b) {
                        x = cplx(x.real(), 0.0);  // self-conjugate bin
                    } else {
                        cplx avg = 0.5 * (x + std::conj(y));
                        x = avg;
                        y = std::conj(avg);
                    }
                }
            }
    for (int c = 0; c < 3; ++c) u.at(c, 0, 0, 0) = cplx(0.0, 0.0);
}

SpectralField dealias(const SpectralField& u, const DealiasRule& rule) {
    if (rule.kind == DealiasRule::Kind::padded) return u;
    SpectralField out = u;
    dealias_two_thirds_inplace(out);
    return out;
}

void dealias_two_thirds_inplace(SpectralField& u) {
    const Grid& g = u.grid();
    const int n = g.n;
    const int cut = n / 3;
    for (int i = 0; i < n; ++i) {
        int ki = std::abs(g.wave(i));
        for (int j = 0; j < n; ++j) {
            int kj = std::abs(g.wave(j));
            for (int l = 0; l < n; ++l) {
                int kl = std::abs(g.wave(l));
                if (ki > cut || kj > cut || kl > cut) {
                    std::int64_t m = g.flat(i, j, l);
                    for (int c = 0; c < 3; ++c) u.raw()[m + c * g.points()] = cplx(0.0, 0.0);
                }
            }
        }
    }
}

SpectralField regrid(const SpectralField& u, const Grid& target) {
    const Grid& g = u.grid();
    if (g.L != target.L) throw std::invalid_argument("regrid: period length mismatch");
    SpectralField out(target);
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
        int ki = g.wave(i);
        if (std::abs(ki) >= std::min(n, target.n) / 2) continue;
        for (int j = 0; j < n; ++j) {
            int kj = g.wave(j);
            if (std::abs(kj) >= std::min(n, target.n) / 2) continue;
            for (int l = 0; l < n; ++l) {
                int kl = g.wave(l);
                if (std::abs(kl) >= std::min(n, target.n) / 2) continue;
                for (int c = 0; c < 3; ++c)
                    out.at(c, target.index_of_wave(ki), target.index_of_wave(kj),
                           target.index_of_wave(kl)) = u.at(c, g.index_of_wave(ki),
                                                            g.index_of_wave(kj), g.index_of_wave(kl));
            }
        }
    }
    return out;
}

std::array<std::vector<double>, 9> gradient_samples(const SpectralField& u, double pad) {
    const Grid& g = u.grid();
    const double s = g.scale();
    std::array<std::vector<double>, 9> out;
    SpectralField d(g);
    for (int jdir = 0; jdir < 3; ++jdir) {
        const int n = g.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    int kv[3] = {g.wave(i), g.wave(j), g.wave(l)};
                    cplx ik = cplx(0.0, s * kv[jdir]);
                    std::int64_t m = g.flat(i, j, l);
                    for (int c = 0; c < 3; ++c)
                        d.raw()[m + c * g.points()] = ik * u.raw()[m + c * g.points()];
                }
        PhysicalField phys = inverse_transform(d, pad);
        for (int c = 0; c < 3; ++c) {
            const double* src = phys.component(c);
            out[c * 3 + jdir].assign(src, src + phys.grid().points());
        }
    }
    return out;
}

}  // namespace cbf
