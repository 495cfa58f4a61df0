#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "daglab/net.hpp"

namespace daglab {

// %.17g round-trips IEEE doubles exactly through decimal text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Checkpoint layout: a magic line, the ordered layer dims, then per layer the
// row-major weight values followed by the bias values, all as decimal text.
inline void save_checkpoint(const Mlp& net, std::ostream& out) {
  out << "daglab-mlp 1\n";
  out << "dims " << net.config().layer_sizes.size();
  for (int s : net.config().layer_sizes) out << ' ' << s;
  out << '\n';
  for (int l = 0; l < net.num_layers(); ++l) {
    const Layer& layer = net.layers()[l];
    out << "w " << layer.w.rows << ' ' << layer.w.cols << '\n';
    for (size_t k = 0; k < layer.w.a.size(); ++k)
      out << format_double(layer.w.a[k]) << ((k + 1) % layer.w.cols == 0 ? '\n' : ' ');
    out << "b " << layer.b.size() << '\n';
    for (size_t k = 0; k < layer.b.size(); ++k)
      out << format_double(layer.b[k]) << (k + 1 == layer.b.size() ? '\n' : ' ');
  }
}

inline void save_checkpoint(const Mlp& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_checkpoint: cannot open " + path);
  save_checkpoint(net, out);
}

// Restores parameters into a network built from `config`; the stored dims
// must match config.layer_sizes.
inline Mlp load_checkpoint(std::istream& in, const NetConfig& config) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "daglab-mlp" || version != 1)
    throw ConfigError("load_checkpoint: unrecognized checkpoint header");
  std::string tag;
  size_t n_dims = 0;
  in >> tag >> n_dims;
  if (tag != "dims") throw ConfigError("load_checkpoint: expected dims");
  std::vector<int> dims(n_dims);
  for (auto& d : dims) in >> d;
  if (dims != config.layer_sizes)
    throw ConfigError("load_checkpoint: layer dims do not match config");

  Rng scratch(0);
  Mlp net(config, scratch);
  for (int l = 0; l < net.num_layers(); ++l) {
    Layer& layer = net.layers()[l];
    int rows = 0, cols = 0;
    in >> tag >> rows >> cols;
    if (tag != "w" || rows != layer.w.rows || cols != layer.w.cols)
      throw ConfigError("load_checkpoint: weight block mismatch at layer " + std::to_string(l));
    for (double& v : layer.w.a) in >> v;
    size_t blen = 0;
    in >> tag >> blen;
    if (tag != "b" || blen != layer.b.size())
      throw ConfigError("load_checkpoint: bias block mismatch at layer " + std::to_string(l));
    for (double& v : layer.b) in >> v;
  }
  if (!in) throw ConfigError("load_checkpoint: truncated checkpoint");
  net.reset_adam();
  return net;
}

inline Mlp load_checkpoint(const std::string& path, const NetConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_checkpoint: cannot open " + path);
  return load_checkpoint(in, config);
}

}  // namespace daglab
