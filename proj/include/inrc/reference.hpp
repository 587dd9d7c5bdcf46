#pragma once

#include <vector>

#include "inrc/siren.hpp"

namespace inrc::reference {

// Plain single-threaded implementations of the network kernels, written as
// straightforward per-pixel loops with no blocking. Kept as the comparison
// baseline for the parallel kernels (tests) and for the benchmark target.

std::vector<double> forward(const SirenNetwork& net, const CoordinateGrid& grid);

double mse_loss(const std::vector<double>& predictions, const ImageBuffer& image);

double loss_and_gradients(const SirenNetwork& net, const CoordinateGrid& grid,
                          const ImageBuffer& image,
                          const std::vector<double>* extra_target, double lambda,
                          GradientSet& out);

}  // namespace inrc::reference
