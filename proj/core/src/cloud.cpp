#include "cbf/cloud.hpp"

namespace cbf {

double semidistance(const PointCloud& A, const PointCloud& B) {
    if (A.states.empty() || B.states.empty())
        throw std::invalid_argument("semidistance: clouds must be nonempty");
    if (A.grid != B.grid) throw std::invalid_argument("semidistance: grid mismatch");
    double worst = 0.0;
    for (const auto& a : A.states) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : B.states) {
            SpectralField d = a;
            d -= b;
            best = std::min(best, norm(d, NormKind::H));
            if (best == 0.0) break;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace cbf
