#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ewh {

struct ObservedState {
  int day = 1;      // 1..7
  int quarter = 1;  // 1..96
  std::vector<double> sensors;  // degC
};

struct FeatureVector {
  int day = 1;
  int quarter = 1;
  std::vector<double> latent;

  int dim() const { return 2 + static_cast<int>(latent.size()); }
};

struct AutoencoderHyper {
  int hidden = 0;          // 0 => max(p, ceil(d/2))
  int epochs = 800;
  double tolerance = 1e-10;   // stop once training MSE drops below this
  double learning_rate = 0.02;
  bool linear_hidden = false;  // sigmoid hidden layers unless set
};

// Symmetric d -> h -> p -> h -> d network with per-feature [0,1] input
// normalization. Immutable once trained.
class AutoencoderModel {
 public:
  std::vector<double> encode(std::span<const double> sensors) const;
  std::vector<double> decode(std::span<const double> latent) const;

  int input_dim() const { return d_; }
  int latent_dim() const { return p_; }
  int hidden_dim() const { return h_; }

  std::vector<double> normalize(std::span<const double> sensors) const;
  std::vector<double> denormalize(std::span<const double> normalized) const;

  std::string to_json() const;
  static AutoencoderModel from_json(const std::string& text);

  double reconstruction_mse(const std::vector<std::vector<double>>& samples) const;

 private:
  friend AutoencoderModel train_autoencoder(
      const std::vector<std::vector<double>>& samples, int latent,
      const AutoencoderHyper& hyper, std::uint64_t seed);

  int d_ = 0, h_ = 0, p_ = 0;
  bool linear_ = false;
  // weights row-major: w1[h,d] b1[h] w2[p,h] b2[p] w3[h,p] b3[h] w4[d,h] b4[d]
  std::vector<double> w1_, b1_, w2_, b2_, w3_, b3_, w4_, b4_;
  std::vector<double> feat_min_, feat_max_;
};

// Minimizes mean squared reconstruction error with full-batch Adam on
// normalized inputs; returns the best parameters seen, so the final MSE never
// exceeds the value at initialization. Deterministic given seed.
AutoencoderModel train_autoencoder(const std::vector<std::vector<double>>& samples,
                                   int latent, const AutoencoderHyper& hyper,
                                   std::uint64_t seed);

// z = (day, quarter, encode(sensors)); without a model the raw sensor vector
// passes through (full-state mode).
FeatureVector featurize(const AutoencoderModel* model, const ObservedState& x);

}  // namespace ewh
