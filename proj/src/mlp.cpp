#include "cad/mlp.hpp"

#include <cmath>

#include "cad/errors.hpp"
#include "cad/rng.hpp"

namespace cad {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Activations for every layer, input first.
std::vector<std::vector<double>> forward(const MlpModel& net, std::span<const double> x) {
  std::vector<std::vector<double>> acts;
  acts.reserve(net.layer_sizes.size());
  acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const auto in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
    const auto& w = net.weights[l];
    const auto& a = acts.back();
    std::vector<double> next(out);
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = w.data() + o * (in + 1);
      double z = row[in];
      for (std::size_t i = 0; i < in; ++i) z += row[i] * a[i];
      next[o] = sigmoid(z);
    }
    acts.push_back(std::move(next));
  }
  return acts;
}

} // namespace

std::vector<std::size_t> resolve_hidden_layers(const MlpParams& hp, std::size_t inputs) {
  if (hp.hidden_layers) return *hp.hidden_layers;
  return {(inputs + 2 + 1) / 2};
}

MlpModel init_mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw ConfigError("mlp: need input and output layers");
  MlpModel net;
  net.layer_sizes = std::move(layer_sizes);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    std::vector<double> w(net.layer_sizes[l + 1] * (net.layer_sizes[l] + 1));
    for (auto& v : w) v = rng.uniform01() - 0.5;
    net.weights.push_back(std::move(w));
  }
  return net;
}

double mlp_output(const MlpModel& net, std::span<const double> x) { return forward(net, x).back()[0]; }

double mlp_loss(const MlpModel& net, const TrainMatrix& data) {
  double loss = 0;
  for (std::size_t r = 0; r < data.rows; ++r) {
    const double diff = mlp_output(net, data.row(r)) - data.y[r];
    loss += 0.5 * diff * diff;
  }
  return loss / static_cast<double>(data.rows);
}

double mlp_loss_and_gradient(const MlpModel& net, const TrainMatrix& data, std::vector<std::vector<double>>& gradient) {
  gradient.resize(net.weights.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) gradient[l].assign(net.weights[l].size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.rows);
  const auto layers = net.layer_sizes.size();
  double loss = 0;
  for (std::size_t r = 0; r < data.rows; ++r) {
    const auto acts = forward(net, data.row(r));
    const double o = acts.back()[0];
    const double diff = o - data.y[r];
    loss += 0.5 * diff * diff;
    // delta at the output pre-activation
    std::vector<double> delta{diff * o * (1 - o) * inv_n};
    for (std::size_t l = layers - 1; l-- > 0;) {
      const auto in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
      const auto& a = acts[l];
      auto& g = gradient[l];
      for (std::size_t o2 = 0; o2 < out; ++o2) {
        double* grow = g.data() + o2 * (in + 1);
        for (std::size_t i = 0; i < in; ++i) grow[i] += delta[o2] * a[i];
        grow[in] += delta[o2];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      const auto& w = net.weights[l];
      for (std::size_t o2 = 0; o2 < out; ++o2)
        for (std::size_t i = 0; i < in; ++i) prev[i] += w[o2 * (in + 1) + i] * delta[o2];
      for (std::size_t i = 0; i < in; ++i) prev[i] *= a[i] * (1 - a[i]);
      delta = std::move(prev);
    }
  }
  return loss * inv_n;
}

TrainedModel train_mlp(const Dataset& d, const MlpParams& hp, std::optional<ScalingParams> scaling) {
  ModelSpec spec{hp};
  validate(spec);
  if (d.empty()) throw DataError("mlp: empty training set");
  if (!scaling) scaling = fit_standardizer(d);
  const auto data = make_matrix(d, scaling);

  std::vector<std::size_t> sizes{data.cols};
  for (auto h : resolve_hidden_layers(hp, data.cols)) sizes.push_back(h);
  sizes.push_back(1);
  MlpModel net = init_mlp(sizes, hp.seed);

  std::vector<std::vector<double>> grad, velocity(net.weights.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) velocity[l].assign(net.weights[l].size(), 0.0);
  double prev_loss = std::numeric_limits<double>::infinity();
  TrainingMeta meta{spec, d.size(), {}};
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    const double loss = mlp_loss_and_gradient(net, data, grad);
    if (!std::isfinite(loss)) throw TrainingError("mlp: loss diverged (non-finite) at epoch " + std::to_string(epoch));
    if (loss > prev_loss + 1e-6 && !net.non_monotone) {
      net.non_monotone = true;
      net.first_increase_epoch = epoch;
      meta.warnings.push_back("mlp: training loss increased at epoch " + std::to_string(epoch));
    }
    prev_loss = loss;
    for (std::size_t l = 0; l < net.weights.size(); ++l)
      for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
        velocity[l][i] = hp.momentum * velocity[l][i] - hp.learning_rate * grad[l][i];
        net.weights[l][i] += velocity[l][i];
      }
  }
  net.final_loss = mlp_loss(net, data);
  if (!std::isfinite(net.final_loss)) throw TrainingError("mlp: loss diverged (non-finite) after the final epoch");
  return TrainedModel{std::move(net), d.schema, std::move(scaling), std::move(meta)};
}

} // namespace cad
