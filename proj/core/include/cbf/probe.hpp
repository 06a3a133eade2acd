#pragma once

#include <cmath>
#include <string>

namespace cbf {

// Numeric record of one checked identity or inequality.  For inequalities the
// convention is rhs >= lhs and gap = rhs - lhs; for identities gap is the
// residual.  passed <=> gap >= -tolerance (inequality) or |gap| <= tolerance.
struct OperatorProbeReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    static OperatorProbeReport inequality(std::string name, double lhs, double rhs, double tolerance) {
        OperatorProbeReport p;
        p.name = std::move(name);
        p.lhs = lhs;
        p.rhs = rhs;
        p.gap = rhs - lhs;
        p.tolerance = tolerance;
        p.passed = p.gap >= -tolerance;
        return p;
    }

    static OperatorProbeReport identity(std::string name, double lhs, double rhs, double tolerance) {
        OperatorProbeReport p;
        p.name = std::move(name);
        p.lhs = lhs;
        p.rhs = rhs;
        p.gap = rhs - lhs;
        p.tolerance = tolerance;
        p.passed = std::abs(p.gap) <= tolerance;
        return p;
    }
};

}  // namespace cbf
