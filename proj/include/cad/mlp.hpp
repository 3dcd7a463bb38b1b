#pragma once

#include <cstdint>
#include <vector>

#include "cad/model.hpp"

namespace cad {

/// Weights and biases drawn uniformly from [-0.5, 0.5].
MlpModel init_mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

/// Output of the final sigmoid unit.
double mlp_output(const MlpModel& net, std::span<const double> x);

/// Mean over records of 0.5 * (output - label)^2.
double mlp_loss(const MlpModel& net, const TrainMatrix& data);

/// Same loss; fills `gradient` (shaped like net.weights) by backpropagation.
double mlp_loss_and_gradient(const MlpModel& net, const TrainMatrix& data, std::vector<std::vector<double>>& gradient);

/// Hidden layer sizes a spec resolves to for `inputs` features.
std::vector<std::size_t> resolve_hidden_layers(const MlpParams& hp, std::size_t inputs);

} // namespace cad
