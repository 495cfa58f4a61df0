#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "daglab/errors.hpp"
#include "daglab/rng.hpp"

namespace daglab {

// Dense-network hyperparameters. layer_sizes runs input..output and is at
// least two entries long.
struct NetConfig {
  std::vector<int> layer_sizes;
  double dropout = 0.0;  // per-hidden-unit drop probability d, 0 <= d < 1
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double l2_weight = 0.0;
  int train_epochs = 100;
  int batch_size = 32;
  // Fixed multiplicative rescaling of the raw input before the first layer.
  // Keeps large-magnitude observations (e.g. lidar ranges in meters) in a
  // range the initialization expects. 1.0 means identity.
  double input_scale = 1.0;

  void validate() const {
    if (layer_sizes.size() < 2) throw ConfigError("net: layer_sizes needs input and output dims");
    for (int s : layer_sizes)
      if (s < 1) throw ConfigError("net: every layer size must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("net.dropout must be in [0,1)");
    if (!(learning_rate > 0.0)) throw ConfigError("net.learning_rate must be > 0");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("net.adam_beta1 must be in (0,1)");
    if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("net.adam_beta2 must be in (0,1)");
    if (!(adam_epsilon > 0.0)) throw ConfigError("net.adam_epsilon must be > 0");
    if (l2_weight < 0.0) throw ConfigError("net.l2_weight must be >= 0");
    if (train_epochs < 1) throw ConfigError("net.train_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("net.batch_size must be >= 1");
    if (!(input_scale > 0.0) || !std::isfinite(input_scale))
      throw ConfigError("net.input_scale must be finite and > 0");
  }
};

// Row-major matrix, sized once.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

struct Layer {
  Mat w;                  // out x in
  std::vector<double> b;  // out
};

struct AdamState {
  std::vector<Mat> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;
  long step_count = 0;
};

// One binary keep-vector per hidden layer, entries in {0,1}.
struct DropoutMasks {
  std::vector<std::vector<std::uint8_t>> keep;
};

// Gradient buffers shaped like the parameters.
struct Gradients {
  std::vector<Mat> w;
  std::vector<std::vector<double>> b;
};

// One training example as spans over caller-owned storage.
struct SampleView {
  std::span<const double> input;
  std::span<const double> target;
};

struct TrainReport {
  double final_loss = 0.0;  // deterministic full-dataset loss after training
  int epochs_run = 0;
};

// Multilayer perceptron: ReLU hidden layers, linear output, inverted dropout
// on hidden activations. Stochastic passes scale kept units by 1/(1-d), so
// the deterministic pass needs no rescaling and d = 0 reduces the stochastic
// pass to the deterministic one exactly.
class Mlp {
 public:
  Mlp(NetConfig config, Rng& init_rng) : cfg_(std::move(config)) {
    cfg_.validate();
    const int n_layers = static_cast<int>(cfg_.layer_sizes.size()) - 1;
    layers_.resize(n_layers);
    for (int l = 0; l < n_layers; ++l) {
      const int fan_in = cfg_.layer_sizes[l];
      const int fan_out = cfg_.layer_sizes[l + 1];
      layers_[l].w = Mat(fan_out, fan_in);
      layers_[l].b.assign(fan_out, 0.0);
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& v : layers_[l].w.a) v = init_rng.uniform(-bound, bound);
    }
    reset_adam();
  }

  const NetConfig& config() const { return cfg_; }
  int input_dim() const { return cfg_.layer_sizes.front(); }
  int output_dim() const { return cfg_.layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  int num_hidden_layers() const { return num_layers() - 1; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  const AdamState& adam_state() const { return adam_; }
  AdamState& adam_state() { return adam_; }

  void reset_adam() {
    adam_.m_w.clear();
    adam_.v_w.clear();
    adam_.m_b.clear();
    adam_.v_b.clear();
    for (const Layer& layer : layers_) {
      adam_.m_w.emplace_back(layer.w.rows, layer.w.cols);
      adam_.v_w.emplace_back(layer.w.rows, layer.w.cols);
      adam_.m_b.emplace_back(layer.b.size(), 0.0);
      adam_.v_b.emplace_back(layer.b.size(), 0.0);
    }
    adam_.step_count = 0;
  }

  // Re-draw the initialization (used for cold-start retraining).
  void reinit(Rng& init_rng) {
    for (Layer& layer : layers_) {
      const double bound = std::sqrt(6.0 / (layer.w.cols + layer.w.rows));
      for (double& v : layer.w.a) v = init_rng.uniform(-bound, bound);
      for (double& v : layer.b) v = 0.0;
    }
    reset_adam();
  }

  // Expected (dropout-free) forward pass.
  std::vector<double> forward_deterministic(std::span<const double> input) const {
    check_input(input);
    std::vector<double> act(input.begin(), input.end());
    scale_input(act);
    std::vector<double> next;
    for (int l = 0; l < num_layers(); ++l) {
      affine(layers_[l], act, next);
      if (l < num_layers() - 1)
        for (double& v : next) v = v > 0.0 ? v : 0.0;
      act.swap(next);
    }
    return act;
  }

  DropoutMasks sample_masks(Rng& rng) const {
    DropoutMasks masks;
    masks.keep.resize(num_hidden_layers());
    for (int l = 0; l < num_hidden_layers(); ++l) {
      const int width = cfg_.layer_sizes[l + 1];
      masks.keep[l].resize(width);
      for (int j = 0; j < width; ++j)
        masks.keep[l][j] = rng.uniform01() >= cfg_.dropout ? 1 : 0;
    }
    return masks;
  }

  // Forward pass under given masks; kept hidden units are scaled by 1/(1-d).
  std::vector<double> forward_masked(std::span<const double> input,
                                     const DropoutMasks& masks) const {
    check_input(input);
    if (static_cast<int>(masks.keep.size()) != num_hidden_layers())
      throw ShapeError("forward_masked: mask layer count mismatch");
    const double inv_keep = 1.0 / (1.0 - cfg_.dropout);
    std::vector<double> act(input.begin(), input.end());
    scale_input(act);
    std::vector<double> next;
    for (int l = 0; l < num_layers(); ++l) {
      affine(layers_[l], act, next);
      if (l < num_layers() - 1) {
        const auto& keep = masks.keep[l];
        if (keep.size() != next.size()) throw ShapeError("forward_masked: mask width mismatch");
        for (size_t j = 0; j < next.size(); ++j) {
          double v = next[j] > 0.0 ? next[j] : 0.0;
          next[j] = keep[j] ? v * inv_keep : 0.0;
        }
      }
      act.swap(next);
    }
    return act;
  }

  // One stochastic pass with freshly sampled masks. With d = 0 no masks are
  // sampled (no rng draws) and the result equals forward_deterministic.
  std::vector<double> forward_stochastic(std::span<const double> input, Rng& rng) const {
    if (cfg_.dropout == 0.0) return forward_deterministic(input);
    return forward_masked(input, sample_masks(rng));
  }

  bool parameters_finite() const {
    for (const Layer& layer : layers_) {
      for (double v : layer.w.a)
        if (!std::isfinite(v)) return false;
      for (double v : layer.b)
        if (!std::isfinite(v)) return false;
    }
    return true;
  }

  double l2_penalty() const {
    double sum = 0.0;
    for (const Layer& layer : layers_)
      for (double v : layer.w.a) sum += v * v;
    return cfg_.l2_weight * sum;
  }

 private:
  friend class NetTrainer;

  void check_input(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != input_dim())
      throw ShapeError("forward: input length " + std::to_string(input.size()) +
                       " != " + std::to_string(input_dim()));
  }

  void scale_input(std::vector<double>& act) const {
    if (cfg_.input_scale != 1.0)
      for (double& v : act) v *= cfg_.input_scale;
  }

  static void affine(const Layer& layer, const std::vector<double>& in,
                     std::vector<double>& out) {
    out.resize(layer.w.rows);
    for (int i = 0; i < layer.w.rows; ++i) {
      const double* wr = layer.w.row(i);
      double acc = layer.b[i];
      for (int j = 0; j < layer.w.cols; ++j) acc += wr[j] * in[j];
      out[i] = acc;
    }
  }

  NetConfig cfg_;
  std::vector<Layer> layers_;
  AdamState adam_;
};

// Scratch buffers for batched forward/backward passes, reused across calls.
class NetTrainer {
 public:
  explicit NetTrainer(const Mlp& net) { bind(net); }

  // Batch loss: mean squared error over batch and output dimensions plus
  // l2_weight * sum of squared weights (biases excluded). Deterministic
  // (no dropout) when masks == nullptr.
  double loss(const Mlp& net, std::span<const SampleView> batch,
              const std::vector<DropoutMasks>* masks = nullptr) {
    if (batch.empty()) throw ShapeError("loss: empty batch");
    bind(net);
    double mse = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
      forward(net, batch[i], masks ? &(*masks)[i] : nullptr);
      const auto& pred = acts_.back();
      if (batch[i].target.size() != pred.size()) throw ShapeError("loss: target size mismatch");
      for (size_t k = 0; k < pred.size(); ++k) {
        const double e = pred[k] - batch[i].target[k];
        mse += e * e;
      }
    }
    mse /= static_cast<double>(batch.size()) * net.output_dim();
    return mse + net.l2_penalty();
  }

  // Exact gradient of the batch loss above, masks held fixed during the
  // backward pass. Returns the batch loss. `out` is resized to match.
  double gradients(const Mlp& net, std::span<const SampleView> batch,
                   const std::vector<DropoutMasks>* masks, Gradients& out) {
    if (batch.empty()) throw ShapeError("gradients: empty batch");
    if (masks && masks->size() != batch.size())
      throw ShapeError("gradients: one mask set per example required");
    bind(net);
    const int n_layers = net.num_layers();
    out.w.resize(n_layers);
    out.b.resize(n_layers);
    for (int l = 0; l < n_layers; ++l) {
      const Layer& layer = net.layers()[l];
      if (out.w[l].rows != layer.w.rows || out.w[l].cols != layer.w.cols)
        out.w[l] = Mat(layer.w.rows, layer.w.cols);
      else
        std::fill(out.w[l].a.begin(), out.w[l].a.end(), 0.0);
      out.b[l].assign(layer.b.size(), 0.0);
    }

    const double inv_norm = 1.0 / (static_cast<double>(batch.size()) * net.output_dim());
    double mse = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
      const DropoutMasks* mask = masks ? &(*masks)[i] : nullptr;
      forward(net, batch[i], mask);
      const auto& pred = acts_.back();
      if (batch[i].target.size() != pred.size())
        throw ShapeError("gradients: target size mismatch");

      // dL/dz at the linear output
      auto& delta = delta_buf_[n_layers];
      delta.resize(pred.size());
      for (size_t k = 0; k < pred.size(); ++k) {
        const double e = pred[k] - batch[i].target[k];
        mse += e * e;
        delta[k] = 2.0 * e * inv_norm;
      }

      for (int l = n_layers - 1; l >= 0; --l) {
        const Layer& layer = net.layers()[l];
        const auto& a_prev = acts_[l];
        auto& d_out = delta_buf_[l + 1];
        for (int r = 0; r < layer.w.rows; ++r) {
          const double dr = d_out[r];
          if (dr == 0.0) continue;
          double* gw = out.w[l].row(r);
          for (int c = 0; c < layer.w.cols; ++c) gw[c] += dr * a_prev[c];
          out.b[l][r] += dr;
        }
        if (l == 0) break;
        // propagate through W, then through the dropout/ReLU of layer l-1
        auto& d_in = delta_buf_[l];
        d_in.assign(layer.w.cols, 0.0);
        for (int r = 0; r < layer.w.rows; ++r) {
          const double dr = d_out[r];
          if (dr == 0.0) continue;
          const double* wr = layer.w.row(r);
          for (int c = 0; c < layer.w.cols; ++c) d_in[c] += dr * wr[c];
        }
        const auto& scale = act_scale_[l - 1];
        for (size_t c = 0; c < d_in.size(); ++c) d_in[c] *= scale[c];
      }
    }

    const double l2w = net.config().l2_weight;
    if (l2w > 0.0) {
      for (int l = 0; l < n_layers; ++l) {
        const Mat& w = net.layers()[l].w;
        for (size_t k = 0; k < w.a.size(); ++k) out.w[l].a[k] += 2.0 * l2w * w.a[k];
      }
    }
    return mse * inv_norm + net.l2_penalty();
  }

 private:
  void bind(const Mlp& net) {
    const int n_layers = net.num_layers();
    acts_.resize(n_layers + 1);
    act_scale_.resize(net.num_hidden_layers());
    delta_buf_.resize(n_layers + 1);
  }

  // Forward pass storing activations and the combined ReLU-and-dropout
  // derivative scale for each hidden layer.
  void forward(const Mlp& net, const SampleView& sample, const DropoutMasks* mask) {
    if (static_cast<int>(sample.input.size()) != net.input_dim())
      throw ShapeError("forward: input length mismatch");
    const double d = net.config().dropout;
    const double inv_keep = mask ? 1.0 / (1.0 - d) : 1.0;
    acts_[0].assign(sample.input.begin(), sample.input.end());
    if (net.config().input_scale != 1.0)
      for (double& v : acts_[0]) v *= net.config().input_scale;
    for (int l = 0; l < net.num_layers(); ++l) {
      Mlp::affine(net.layers()[l], acts_[l], acts_[l + 1]);
      if (l < net.num_layers() - 1) {
        auto& a = acts_[l + 1];
        auto& scale = act_scale_[l];
        scale.assign(a.size(), 0.0);
        const std::vector<std::uint8_t>* keep = mask ? &mask->keep[l] : nullptr;
        if (keep && keep->size() != a.size()) throw ShapeError("forward: mask width mismatch");
        for (size_t j = 0; j < a.size(); ++j) {
          const double s = (a[j] > 0.0 ? 1.0 : 0.0) * (keep ? ((*keep)[j] ? inv_keep : 0.0) : 1.0);
          scale[j] = s;
          a[j] = a[j] > 0.0 ? a[j] * (keep ? ((*keep)[j] ? inv_keep : 0.0) : 1.0) : 0.0;
        }
      }
    }
  }

  std::vector<std::vector<double>> acts_;       // acts_[0] = scaled input
  std::vector<std::vector<double>> act_scale_;  // per hidden layer
  std::vector<std::vector<double>> delta_buf_;
};

inline double loss(const Mlp& net, std::span<const SampleView> batch) {
  NetTrainer trainer(net);
  return trainer.loss(net, batch);
}

inline Gradients gradients(const Mlp& net, std::span<const SampleView> batch,
                           const std::vector<DropoutMasks>* masks = nullptr) {
  NetTrainer trainer(net);
  Gradients g;
  trainer.gradients(net, batch, masks, g);
  return g;
}

// Bias-corrected ADAM update, in place. Throws on nonfinite gradients.
inline void adam_step(Mlp& net, const Gradients& grads) {
  if (grads.w.size() != net.layers().size())
    throw ShapeError("adam_step: gradient layer count mismatch");
  const NetConfig& cfg = net.config();
  AdamState& st = net.adam_state();
  st.step_count += 1;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(st.step_count));
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(st.step_count));
  for (size_t l = 0; l < net.layers().size(); ++l) {
    Layer& layer = net.layers()[l];
    if (grads.w[l].rows != layer.w.rows || grads.w[l].cols != layer.w.cols ||
        grads.b[l].size() != layer.b.size())
      throw ShapeError("adam_step: gradient shape mismatch");
    auto update = [&](double& theta, double g, double& m, double& v) {
      if (!std::isfinite(g)) throw DivergenceError("adam_step: nonfinite gradient");
      m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
      v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g * g;
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      theta -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    };
    for (size_t k = 0; k < layer.w.a.size(); ++k)
      update(layer.w.a[k], grads.w[l].a[k], st.m_w[l].a[k], st.v_w[l].a[k]);
    for (size_t k = 0; k < layer.b.size(); ++k)
      update(layer.b[k], grads.b[l][k], st.m_b[l][k], st.v_b[l][k]);
  }
}

// Loss value above which training aborts with DivergenceError.
inline constexpr double kLossAbortBound = 1e6;

// Mini-batch training: train_epochs passes of shuffled mini-batches with
// fresh dropout masks per example per batch. The final partial batch of an
// epoch is included. Reported loss is the deterministic full-data loss.
inline TrainReport train(Mlp& net, std::span<const SampleView> data, Rng& rng) {
  if (data.empty()) throw ShapeError("train: empty dataset");
  const NetConfig& cfg = net.config();
  NetTrainer trainer(net);
  Gradients grads;
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<SampleView> batch;
  std::vector<DropoutMasks> masks;

  for (int epoch = 0; epoch < cfg.train_epochs; ++epoch) {
    // Fisher-Yates shuffle
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = rng.below(i);
      std::swap(order[i - 1], order[j]);
    }
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (size_t i = start; i < end; ++i) batch.push_back(data[order[i]]);
      const std::vector<DropoutMasks>* mask_ptr = nullptr;
      if (cfg.dropout > 0.0) {
        masks.clear();
        for (size_t i = 0; i < batch.size(); ++i) masks.push_back(net.sample_masks(rng));
        mask_ptr = &masks;
      }
      const double batch_loss = trainer.gradients(net, batch, mask_ptr, grads);
      if (!std::isfinite(batch_loss) || batch_loss > kLossAbortBound)
        throw DivergenceError("train: loss diverged (" + std::to_string(batch_loss) + ")");
      adam_step(net, grads);
    }
  }

  TrainReport report;
  report.epochs_run = cfg.train_epochs;
  report.final_loss = trainer.loss(net, data);
  if (!std::isfinite(report.final_loss))
    throw DivergenceError("train: nonfinite final loss");
  return report;
}

}  // namespace daglab
