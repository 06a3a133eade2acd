#pragma once

#include <string>
#include <vector>

#include "cbf/field.hpp"

namespace cbf {

// Physical and model constants of the damped system
//   du/dt + mu A u + B(u) + beta C(u) = f,   C(u) = P(|u|^{r-1} u).
// alpha is the Darcy coefficient; it never enters the u-drift (the analysis
// sets it to zero there) and reappears only as the drift shift of the noise
// process.
struct CbfParams {
    Grid grid;
    double mu = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
    int r = 3;
    SpectralField forcing;  // time-independent, divergence-free, zero-mean; empty => zero

    CbfParams() = default;
    CbfParams(const Grid& g, double mu_, double beta_, int r_)
        : grid(g), mu(mu_), beta(beta_), r(r_) {}

    bool has_forcing() const { return !forcing.raw().empty(); }

    // Fine-grid factor making the degree-r product evaluation alias-free.
    double forchheimer_pad() const { return std::max(1.5, (r + 1) / 2.0); }

    // r = 3 monotonicity results need 2*beta*mu >= 1.
    bool critical_condition_ok() const { return r != 3 || 2.0 * beta * mu >= 1.0; }

    // Returns human-readable constraint violations; soft ones are flagged, not fatal.
    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        if (!(mu > 0.0)) v.push_back("mu must be positive");
        if (beta < 0.0) v.push_back("beta must be nonnegative");
        if (alpha < 0.0) v.push_back("alpha must be nonnegative");
        if (r < 3 || r % 2 == 0) v.push_back("r must be an odd integer >= 3");
        return v;
    }
};

}  // namespace cbf
