#include "ewh/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ewh/seeds.hpp"
#include "json.hpp"

namespace ewh {

namespace {

inline double activate(double v, bool linear) {
  return linear ? v : 1.0 / (1.0 + std::exp(-v));
}

inline double activate_grad(double a, bool linear) {
  return linear ? 1.0 : a * (1.0 - a);
}

// y = W x + b, W is [rows, cols] row-major
void affine(const std::vector<double>& w, const std::vector<double>& b,
            const double* x, int rows, int cols, double* out) {
  for (int r = 0; r < rows; ++r) {
    double s = b[r];
    const double* wr = w.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) s += wr[c] * x[c];
    out[r] = s;
  }
}

struct Adam {
  std::vector<double> m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int t = 0;

  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad,
            double lr, std::size_t offset) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      std::size_t j = offset + i;
      m[j] = beta1 * m[j] + (1.0 - beta1) * grad[i];
      v[j] = beta2 * v[j] + (1.0 - beta2) * grad[i] * grad[i];
      double mh = m[j] / (1.0 - std::pow(beta1, t));
      double vh = v[j] / (1.0 - std::pow(beta2, t));
      params[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
};

}  // namespace

std::vector<double> AutoencoderModel::normalize(std::span<const double> s) const {
  if (static_cast<int>(s.size()) != d_)
    throw std::invalid_argument("normalize: dimension mismatch");
  std::vector<double> out(d_);
  for (int i = 0; i < d_; ++i)
    out[i] = (s[i] - feat_min_[i]) / (feat_max_[i] - feat_min_[i]);
  return out;
}

std::vector<double> AutoencoderModel::denormalize(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != d_)
    throw std::invalid_argument("denormalize: dimension mismatch");
  std::vector<double> out(d_);
  for (int i = 0; i < d_; ++i)
    out[i] = z[i] * (feat_max_[i] - feat_min_[i]) + feat_min_[i];
  return out;
}

std::vector<double> AutoencoderModel::encode(std::span<const double> sensors) const {
  auto xn = normalize(sensors);
  std::vector<double> a1(h_), z(p_);
  affine(w1_, b1_, xn.data(), h_, d_, a1.data());
  for (double& v : a1) v = activate(v, linear_);
  affine(w2_, b2_, a1.data(), p_, h_, z.data());
  for (double& v : z) v = activate(v, linear_);
  return z;
}

std::vector<double> AutoencoderModel::decode(std::span<const double> latent) const {
  if (static_cast<int>(latent.size()) != p_)
    throw std::invalid_argument("decode: dimension mismatch");
  std::vector<double> a3(h_), xn(d_);
  affine(w3_, b3_, latent.data(), h_, p_, a3.data());
  for (double& v : a3) v = activate(v, linear_);
  affine(w4_, b4_, a3.data(), d_, h_, xn.data());
  return denormalize(xn);
}

double AutoencoderModel::reconstruction_mse(
    const std::vector<std::vector<double>>& samples) const {
  double se = 0.0;
  for (const auto& s : samples) {
    auto xn = normalize(s);
    auto z = encode(s);
    std::vector<double> a3(h_), xr(d_);
    affine(w3_, b3_, z.data(), h_, p_, a3.data());
    for (double& v : a3) v = activate(v, linear_);
    affine(w4_, b4_, a3.data(), d_, h_, xr.data());
    for (int i = 0; i < d_; ++i) se += (xr[i] - xn[i]) * (xr[i] - xn[i]);
  }
  return se / (samples.size() * static_cast<std::size_t>(d_));
}

AutoencoderModel train_autoencoder(const std::vector<std::vector<double>>& samples,
                                   int latent, const AutoencoderHyper& hyper,
                                   std::uint64_t seed) {
  if (samples.size() < 2)
    throw std::invalid_argument("train_autoencoder: need at least 2 samples");
  const int d = static_cast<int>(samples.front().size());
  if (latent < 1 || latent > d)
    throw std::invalid_argument("train_autoencoder: latent dim must be in [1, d]");
  for (const auto& s : samples)
    if (static_cast<int>(s.size()) != d)
      throw std::invalid_argument("train_autoencoder: inconsistent sample dims");

  AutoencoderModel model;
  model.d_ = d;
  model.p_ = latent;
  model.h_ = hyper.hidden > 0 ? hyper.hidden : std::max(latent, (d + 1) / 2);
  model.linear_ = hyper.linear_hidden;
  const int h = model.h_;
  const int p = model.p_;

  model.feat_min_.assign(d, 0.0);
  model.feat_max_.assign(d, 0.0);
  for (int i = 0; i < d; ++i) {
    double lo = samples[0][i], hi = samples[0][i];
    for (const auto& s : samples) {
      lo = std::min(lo, s[i]);
      hi = std::max(hi, s[i]);
    }
    if (hi - lo < 1e-12) {  // constant feature: widen instead of failing
      lo -= 0.5;
      hi += 0.5;
    }
    model.feat_min_[i] = lo;
    model.feat_max_[i] = hi;
  }

  const int n = static_cast<int>(samples.size());
  std::vector<double> xn(static_cast<std::size_t>(n) * d);
  for (int s = 0; s < n; ++s) {
    auto row = model.normalize(samples[s]);
    std::copy(row.begin(), row.end(), xn.begin() + static_cast<std::size_t>(s) * d);
  }

  Rng rng(seed);
  auto init = [&](std::vector<double>& w, int rows, int cols) {
    w.resize(static_cast<std::size_t>(rows) * cols);
    double r = std::sqrt(6.0 / (rows + cols));
    for (double& v : w) v = rng.uniform(-r, r);
  };
  init(model.w1_, h, d);
  model.b1_.assign(h, 0.0);
  init(model.w2_, p, h);
  model.b2_.assign(p, 0.0);
  init(model.w3_, h, p);
  model.b3_.assign(h, 0.0);
  init(model.w4_, d, h);
  model.b4_.assign(d, 0.0);

  auto& w1 = model.w1_; auto& b1 = model.b1_;
  auto& w2 = model.w2_; auto& b2 = model.b2_;
  auto& w3 = model.w3_; auto& b3 = model.b3_;
  auto& w4 = model.w4_; auto& b4 = model.b4_;
  const bool lin = model.linear_;

  const std::size_t n_params = w1.size() + b1.size() + w2.size() + b2.size() +
                               w3.size() + b3.size() + w4.size() + b4.size();
  Adam adam(n_params);

  std::vector<double> gw1(w1.size()), gb1(b1.size()), gw2(w2.size()),
      gb2(b2.size()), gw3(w3.size()), gb3(b3.size()), gw4(w4.size()),
      gb4(b4.size());
  std::vector<double> a1(h), z(p), a3(h), xr(d), dout(d), da3(h), dz(p), da1(h);

  double best_mse = std::numeric_limits<double>::infinity();
  AutoencoderModel best = model;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::fill(gw1.begin(), gw1.end(), 0.0);
    std::fill(gb1.begin(), gb1.end(), 0.0);
    std::fill(gw2.begin(), gw2.end(), 0.0);
    std::fill(gb2.begin(), gb2.end(), 0.0);
    std::fill(gw3.begin(), gw3.end(), 0.0);
    std::fill(gb3.begin(), gb3.end(), 0.0);
    std::fill(gw4.begin(), gw4.end(), 0.0);
    std::fill(gb4.begin(), gb4.end(), 0.0);
    double se = 0.0;

    for (int s = 0; s < n; ++s) {
      const double* x = xn.data() + static_cast<std::size_t>(s) * d;
      affine(w1, b1, x, h, d, a1.data());
      for (double& v : a1) v = activate(v, lin);
      affine(w2, b2, a1.data(), p, h, z.data());
      for (double& v : z) v = activate(v, lin);
      affine(w3, b3, z.data(), h, p, a3.data());
      for (double& v : a3) v = activate(v, lin);
      affine(w4, b4, a3.data(), d, h, xr.data());

      for (int i = 0; i < d; ++i) {
        double diff = xr[i] - x[i];
        se += diff * diff;
        dout[i] = 2.0 * diff / (static_cast<double>(n) * d);
      }
      // layer 4 (linear output)
      for (int r = 0; r < d; ++r) {
        gb4[r] += dout[r];
        double* g = gw4.data() + static_cast<std::size_t>(r) * h;
        for (int c = 0; c < h; ++c) g[c] += dout[r] * a3[c];
      }
      for (int c = 0; c < h; ++c) {
        double ssum = 0.0;
        for (int r = 0; r < d; ++r)
          ssum += w4[static_cast<std::size_t>(r) * h + c] * dout[r];
        da3[c] = ssum * activate_grad(a3[c], lin);
      }
      // layer 3
      for (int r = 0; r < h; ++r) {
        gb3[r] += da3[r];
        double* g = gw3.data() + static_cast<std::size_t>(r) * p;
        for (int c = 0; c < p; ++c) g[c] += da3[r] * z[c];
      }
      for (int c = 0; c < p; ++c) {
        double ssum = 0.0;
        for (int r = 0; r < h; ++r)
          ssum += w3[static_cast<std::size_t>(r) * p + c] * da3[r];
        dz[c] = ssum * activate_grad(z[c], lin);
      }
      // layer 2
      for (int r = 0; r < p; ++r) {
        gb2[r] += dz[r];
        double* g = gw2.data() + static_cast<std::size_t>(r) * h;
        for (int c = 0; c < h; ++c) g[c] += dz[r] * a1[c];
      }
      for (int c = 0; c < h; ++c) {
        double ssum = 0.0;
        for (int r = 0; r < p; ++r)
          ssum += w2[static_cast<std::size_t>(r) * h + c] * dz[r];
        da1[c] = ssum * activate_grad(a1[c], lin);
      }
      // layer 1
      for (int r = 0; r < h; ++r) {
        gb1[r] += da1[r];
        double* g = gw1.data() + static_cast<std::size_t>(r) * d;
        for (int c = 0; c < d; ++c) g[c] += da1[r] * x[c];
      }
    }

    double mse = se / (static_cast<double>(n) * d);
    if (mse < best_mse) {
      best_mse = mse;
      best = model;
    }
    if (mse <= hyper.tolerance) break;

    ++adam.t;
    std::size_t off = 0;
    adam.step(w1, gw1, hyper.learning_rate, off); off += w1.size();
    adam.step(b1, gb1, hyper.learning_rate, off); off += b1.size();
    adam.step(w2, gw2, hyper.learning_rate, off); off += w2.size();
    adam.step(b2, gb2, hyper.learning_rate, off); off += b2.size();
    adam.step(w3, gw3, hyper.learning_rate, off); off += w3.size();
    adam.step(b3, gb3, hyper.learning_rate, off); off += b3.size();
    adam.step(w4, gw4, hyper.learning_rate, off); off += w4.size();
    adam.step(b4, gb4, hyper.learning_rate, off);
  }

  double final_mse = model.reconstruction_mse(samples);
  if (final_mse < best_mse) return model;
  return best;
}

FeatureVector featurize(const AutoencoderModel* model, const ObservedState& x) {
  FeatureVector z;
  z.day = x.day;
  z.quarter = x.quarter;
  if (model == nullptr) {
    z.latent = x.sensors;
  } else {
    z.latent = model->encode(x.sensors);
  }
  return z;
}

std::string AutoencoderModel::to_json() const {
  nlohmann::json j;
  j["d"] = d_;
  j["h"] = h_;
  j["p"] = p_;
  j["linear"] = linear_;
  j["w1"] = w1_; j["b1"] = b1_;
  j["w2"] = w2_; j["b2"] = b2_;
  j["w3"] = w3_; j["b3"] = b3_;
  j["w4"] = w4_; j["b4"] = b4_;
  j["feat_min"] = feat_min_;
  j["feat_max"] = feat_max_;
  return j.dump();
}

AutoencoderModel AutoencoderModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  AutoencoderModel m;
  m.d_ = j.at("d").get<int>();
  m.h_ = j.at("h").get<int>();
  m.p_ = j.at("p").get<int>();
  m.linear_ = j.at("linear").get<bool>();
  m.w1_ = j.at("w1").get<std::vector<double>>();
  m.b1_ = j.at("b1").get<std::vector<double>>();
  m.w2_ = j.at("w2").get<std::vector<double>>();
  m.b2_ = j.at("b2").get<std::vector<double>>();
  m.w3_ = j.at("w3").get<std::vector<double>>();
  m.b3_ = j.at("b3").get<std::vector<double>>();
  m.w4_ = j.at("w4").get<std::vector<double>>();
  m.b4_ = j.at("b4").get<std::vector<double>>();
  m.feat_min_ = j.at("feat_min").get<std::vector<double>>();
  m.feat_max_ = j.at("feat_max").get<std::vector<double>>();
  return m;
}

}  // namespace ewh
