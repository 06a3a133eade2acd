#include "cbf/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace cbf {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

struct Parser {
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
    std::vector<std::string> errors;
    std::vector<std::string> consumed;

    bool has(const std::string& key) { return kv.count(key) > 0; }

    template <typename T>
    void get(const std::string& key, T& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        consumed.push_back(key);
        std::istringstream in(it->second.first);
        T v;
        if (!(in >> v)) {
            errors.push_back("line " + std::to_string(it->second.second) + ": cannot parse '" +
                             it->second.first + "' for key " + key);
            return;
        }
        out = v;
    }

    void get_k3(const std::string& key, std::array<int, 3>& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        consumed.push_back(key);
        std::istringstream in(it->second.first);
        std::array<int, 3> v;
        if (!(in >> v[0] >> v[1] >> v[2])) {
            errors.push_back("line " + std::to_string(it->second.second) +
                             ": expected three integers for key " + key);
            return;
        }
        out = v;
    }
};

}  // namespace

std::string hash_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config_text(const std::string& text) {
    Parser p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            p.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) {
            p.errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (p.kv.count(key))
            p.errors.push_back("line " + std::to_string(lineno) + ": duplicate key " + key);
        p.kv[key] = {value, lineno};
    }

    RunConfig cfg;
    cfg.config_hash = hash_hex(text);
    p.get("grid.n", cfg.n);
    p.get("grid.L", cfg.L);
    p.get("params.mu", cfg.mu);
    p.get("params.alpha", cfg.alpha);
    p.get("params.beta", cfg.beta);
    p.get("params.r", cfg.r);
    p.get("params.M0_margin", cfg.M0_margin);
    std::string kind = "zero";
    p.get("forcing.kind", kind);
    if (kind == "zero")
        cfg.forcing.kind = ForcingSpec::Kind::zero;
    else if (kind == "single_mode")
        cfg.forcing.kind = ForcingSpec::Kind::single_mode;
    else if (kind == "seeded_random")
        cfg.forcing.kind = ForcingSpec::Kind::seeded_random;
    else
        p.errors.push_back("forcing.kind must be zero | single_mode | seeded_random");
    p.get_k3("forcing.k", cfg.forcing.k);
    p.get("forcing.amplitude", cfg.forcing.amplitude);
    p.get("forcing.polarization", cfg.forcing.polarization);
    p.get("forcing.k_max", cfg.forcing.k_max);
    p.get("forcing.norm", cfg.forcing.norm);
    p.get("noise.s_exponent", cfg.s_exponent);
    p.get("noise.k_max", cfg.noise_k_max);
    p.get("noise.alpha_ou", cfg.alpha_ou);
    p.get("noise.epsilon", cfg.epsilon);
    p.get("time.dt", cfg.dt);
    p.get("time.T", cfg.T);
    p.get("time.t0", cfg.t0);
    p.get("seeds.omega", cfg.seed_omega);
    p.get("seeds.init", cfg.seed_init);
    p.get("output.dir", cfg.out_dir);
    p.get("run.threads", cfg.threads);

    for (const auto& [key, val] : p.kv)
        if (std::find(p.consumed.begin(), p.consumed.end(), key) == p.consumed.end() &&
            key != "forcing.kind")
            p.errors.push_back("line " + std::to_string(val.second) + ": unknown key " + key);

    // hard constraints
    if (cfg.n < 8 || cfg.n % 2 != 0) p.errors.push_back("grid.n must be even and >= 8");
    if (!(cfg.L > 0.0)) p.errors.push_back("grid.L must be positive");
    if (!(cfg.mu > 0.0)) p.errors.push_back("params.mu must be positive");
    if (cfg.beta < 0.0) p.errors.push_back("params.beta must be nonnegative");
    if (cfg.alpha < 0.0) p.errors.push_back("params.alpha must be nonnegative");
    if (cfg.r < 3 || cfg.r % 2 == 0) p.errors.push_back("params.r must be an odd integer >= 3");
    if (!(cfg.M0_margin > 1.0)) p.errors.push_back("params.M0_margin must exceed 1");
    if (!(cfg.dt > 0.0)) p.errors.push_back("time.dt must be positive");
    if (cfg.T < 0.0) p.errors.push_back("time.T must be nonnegative");
    if (cfg.t0 < 0.0) p.errors.push_back("time.t0 must be nonnegative");
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
        p.errors.push_back("noise.epsilon must lie in [0, 1]");
    if (cfg.alpha_ou < 0.0) p.errors.push_back("noise.alpha_ou must be nonnegative");
    if (cfg.noise_k_max < 0 || 3 * cfg.noise_k_max > cfg.n)
        p.errors.push_back("noise.k_max must lie in [0, n/3] (0 selects n/3)");
    if (cfg.forcing.kind == ForcingSpec::Kind::single_mode) {
        auto& k = cfg.forcing.k;
        if (k[0] == 0 && k[1] == 0 && k[2] == 0)
            p.errors.push_back("forcing.k must be a nonzero wavevector");
        if (cfg.forcing.polarization != 0 && cfg.forcing.polarization != 1)
            p.errors.push_back("forcing.polarization must be 0 or 1");
    }
    if (cfg.forcing.kind == ForcingSpec::Kind::seeded_random &&
        (cfg.forcing.k_max < 1 || cfg.forcing.k_max > cfg.n / 2))
        p.errors.push_back("forcing.k_max must lie in [1, n/2]");

    if (!p.errors.empty()) {
        std::string msg = "config invalid:";
        for (const auto& e : p.errors) msg += "\n  " + e;
        throw config_error(msg);
    }

    // soft flags
    if (cfg.r == 3 && 2.0 * cfg.beta * cfg.mu < 1.0) {
        std::ostringstream os;
        os << "2*beta*mu = " << 2.0 * cfg.beta * cfg.mu
           << " < 1: the r = 3 monotonicity results need 2*beta*mu >= 1";
        cfg.flags.push_back(os.str());
    }
    if (cfg.s_exponent <= 0.75)
        cfg.flags.push_back(
            "noise.s_exponent <= 3/4: spectral weights not square-summable; noise checks will fail");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

SpectralField single_mode_forcing(const Grid& g, const std::array<int, 3>& k, double amplitude,
                                  int polarization) {
    auto pol = polarization_basis(k);
    SpectralField f(g);
    int i = g.index_of_wave(k[0]), j = g.index_of_wave(k[1]), l = g.index_of_wave(k[2]);
    int mi = g.index_of_wave(-k[0]), mj = g.index_of_wave(-k[1]), ml = g.index_of_wave(-k[2]);
    for (int c = 0; c < 3; ++c) {
        f.at(c, i, j, l) = cplx(amplitude * pol[polarization][c], 0.0);
        f.at(c, mi, mj, ml) = cplx(amplitude * pol[polarization][c], 0.0);
    }
    return f;
}

CbfParams RunConfig::make_params() const {
    CbfParams p(make_grid(), mu, beta, r);
    p.alpha = alpha;
    switch (forcing.kind) {
        case ForcingSpec::Kind::zero:
            break;
        case ForcingSpec::Kind::single_mode:
            p.forcing = single_mode_forcing(p.grid, forcing.k, forcing.amplitude, forcing.polarization);
            break;
        case ForcingSpec::Kind::seeded_random:
            p.forcing = random_divfree_field(p.grid, seed_init, rng::Tag::forcing, 0, forcing.k_max,
                                             forcing.k_max / 2.0, forcing.norm);
            break;
    }
    return p;
}

NoiseModel RunConfig::make_noise_model() const {
    return build_noise_model(make_grid(), s_exponent, effective_noise_k_max());
}

int RunConfig::effective_threads() const {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

}  // namespace cbf
