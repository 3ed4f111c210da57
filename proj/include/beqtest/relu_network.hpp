#pragma once

// Dense feed-forward network with ReLU on every hidden layer and an
// identity output layer, plus the seed-fixed toy networks used for replay
// experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "beqtest/core.hpp"

namespace beq {

struct DenseLayer {
  std::vector<std::vector<double>> weights;  // rows = outputs, columns = inputs
  std::vector<double> bias;

  std::size_t inputs() const { return weights.empty() ? 0 : weights.front().size(); }
  std::size_t outputs() const { return weights.size(); }
};

class ReluNetwork {
 public:
  ReluNetwork() = default;
  ReluNetwork(std::vector<DenseLayer> layers, std::vector<Bound> input_bounds)
      : layers_(std::move(layers)), bounds_(std::move(input_bounds)) {
    if (layers_.empty()) throw Error(ErrorKind::DimensionMismatch, "network without layers");
    std::size_t width = bounds_.size();
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      if (layer.outputs() == 0 || layer.bias.size() != layer.outputs())
        throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(l + 1) + ": bias/weight rows differ");
      for (const auto& row : layer.weights) {
        if (row.size() != width)
          throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(l + 1) + " expects " +
                                                        std::to_string(width) + " inputs");
      }
      width = layer.outputs();
    }
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
      if (!std::isfinite(bounds_[i].lower) || !std::isfinite(bounds_[i].upper) ||
          !(bounds_[i].lower < bounds_[i].upper))
        throw Error(ErrorKind::InvalidBound, "input bound " + std::to_string(i + 1) + " must be finite and non-empty");
    }
  }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  const std::vector<Bound>& input_bounds() const { return bounds_; }
  std::size_t input_size() const { return bounds_.size(); }
  std::size_t output_size() const { return layers_.back().outputs(); }

  std::size_t relu_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) n += layers_[l].outputs();
    return n;
  }

  /// Forward pass without the bounds check.
  std::vector<double> forward(std::span<const double> x) const {
    if (x.size() != input_size())
      throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) + " coordinates, network expects " +
                                                    std::to_string(input_size()));
    std::vector<double> current(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      next.assign(layer.outputs(), 0.0);
      for (std::size_t n = 0; n < layer.outputs(); ++n) {
        double acc = layer.bias[n];
        const auto& row = layer.weights[n];
        for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * current[k];
        next[n] = (l + 1 < layers_.size()) ? std::max(0.0, acc) : acc;
      }
      current.swap(next);
    }
    return current;
  }

  void set_output_affine(double scale, double shift) {
    auto& last = layers_.back();
    for (auto& row : last.weights)
      for (auto& w : row) w *= scale;
    for (auto& b : last.bias) b = b * scale + shift;
  }

 private:
  std::vector<DenseLayer> layers_;
  std::vector<Bound> bounds_;
};

inline std::vector<double> infer(const ReluNetwork& net, std::span<const double> x) {
  require_in_bounds(x, net.input_bounds());
  return net.forward(x);
}

namespace detail {

// Portable uniform draw in [0, 1): std::mt19937_64 output is specified by
// the standard, the distribution classes are not.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Random ReLU network with He-style uniform weights. The output layer is
/// rescaled so that, over a fixed sample of inputs, the 2nd and 98th output
/// percentiles land on `target_lo` and `target_hi`.
inline ReluNetwork generate_network(std::vector<Bound> bounds, const std::vector<std::size_t>& hidden,
                                    std::uint64_t seed, double target_lo, double target_hi) {
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  std::size_t width = bounds.size();
  std::vector<std::size_t> sizes = hidden;
  sizes.push_back(1);
  for (std::size_t out : sizes) {
    DenseLayer layer;
    const double limit = std::sqrt(6.0 / static_cast<double>(width));
    layer.weights.assign(out, std::vector<double>(width));
    layer.bias.assign(out, 0.0);
    for (auto& row : layer.weights)
      for (auto& w : row) w = (2.0 * detail::unit_uniform(rng) - 1.0) * limit;
    for (auto& b : layer.bias) b = (2.0 * detail::unit_uniform(rng) - 1.0) * 0.1;
    layers.push_back(std::move(layer));
    width = out;
  }
  // Inputs are normalized to the unit box before entering the first layer.
  auto& first = layers.front();
  for (std::size_t n = 0; n < first.outputs(); ++n) {
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      const double half = bounds[k].width() / 2.0;
      first.weights[n][k] /= half;
      first.bias[n] -= first.weights[n][k] * (bounds[k].lower + half);
    }
  }
  ReluNetwork net(std::move(layers), bounds);

  std::vector<double> samples;
  std::vector<double> x(bounds.size());
  for (int s = 0; s < 4096; ++s) {
    for (std::size_t k = 0; k < x.size(); ++k)
      x[k] = bounds[k].lower + (1.0 - detail::unit_uniform(rng)) * bounds[k].width();
    samples.push_back(net.forward(x).front());
  }
  std::sort(samples.begin(), samples.end());
  const double lo = samples[samples.size() * 2 / 100];
  const double hi = samples[samples.size() * 98 / 100];
  const double scale = hi > lo ? (target_hi - target_lo) / (hi - lo) : 1.0;
  net.set_output_affine(scale, target_lo - lo * scale);
  return net;
}

/// Lane-keeping shaped network: six normalized inputs, three hidden layers,
/// steering output spread over [-1.04, 1.04].
inline ReluNetwork toy_lka_network(std::uint64_t seed) {
  return generate_network(std::vector<Bound>(6, Bound{-1.0, 1.0}), {16, 16, 16}, seed, -1.04, 1.04);
}

/// Cruise-control shaped network over (ego velocity, relative distance,
/// relative velocity), acceleration output spread over [-3, 2].
inline ReluNetwork toy_acc_network(std::uint64_t seed) {
  return generate_network({Bound{0.0, 30.0}, Bound{0.0, 100.0}, Bound{-10.0, 10.0}}, {16, 16, 16}, seed, -3.0, 2.0);
}

/// y = relu(x + 1) - 1 on (-1, 1]: the identity, realized through one ReLU.
/// Paired with bucket thresholds {-1, 0.5, 1} its class flips at 0.5, up to
/// the rounding of x + 1.
inline ReluNetwork toy_flip_network() {
  return ReluNetwork({DenseLayer{{{1.0}}, {1.0}}, DenseLayer{{{1.0}}, {-1.0}}}, {Bound{-1.0, 1.0}});
}

}  // namespace beq
