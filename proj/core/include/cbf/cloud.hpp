#pragma once

#include <string>
#include <vector>

#include "cbf/spectral_ops.hpp"

namespace cbf {

// Finite set of H-states standing in for a compact set; all set distances in
// the experiments are distances between such clouds.
struct PointCloud {
    Grid grid;
    std::vector<SpectralField> states;
    std::string label;

    std::size_t size() const { return states.size(); }
};

// Hausdorff semidistance sup_{a in A} inf_{b in B} ||a - b||_H, brute force.
double semidistance(const PointCloud& A, const PointCloud& B);

}  // namespace cbf
