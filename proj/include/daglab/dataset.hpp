#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "daglab/net_io.hpp"
#include "daglab/policy.hpp"

namespace daglab {

struct LabeledPair {
  Observation obs;
  Action label;
};

// Growable set of (observation, expert label) pairs. Aggregation only
// appends, so the collection grows monotonically across epochs.
class Dataset {
 public:
  Dataset() = default;

  size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<LabeledPair>& pairs() const { return pairs_; }
  const LabeledPair& operator[](size_t i) const { return pairs_[i]; }
  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }

  void append(LabeledPair pair) {
    if (pairs_.empty()) {
      obs_dim_ = static_cast<int>(pair.obs.values.size());
      act_dim_ = static_cast<int>(pair.label.values.size());
    } else if (static_cast<int>(pair.obs.values.size()) != obs_dim_ ||
               static_cast<int>(pair.label.values.size()) != act_dim_) {
      throw ShapeError("dataset: pair dims inconsistent with existing pairs");
    }
    pairs_.push_back(std::move(pair));
  }

  void append_all(const Dataset& other) {
    for (const LabeledPair& p : other.pairs_) append(p);
  }

  // Span views over the stored pairs, suitable for net training.
  std::vector<SampleView> views() const {
    std::vector<SampleView> v;
    v.reserve(pairs_.size());
    for (const LabeledPair& p : pairs_) v.push_back({p.obs.values, p.label.values});
    return v;
  }

 private:
  std::vector<LabeledPair> pairs_;
  int obs_dim_ = 0;
  int act_dim_ = 0;
};

// Union of two datasets with append semantics: d's pairs first, then d_i's,
// duplicates retained.
inline Dataset aggregate(const Dataset& d, const Dataset& d_i) {
  Dataset out;
  out.append_all(d);
  out.append_all(d_i);
  return out;
}

// Delimited text dump: a dims header, then one pair per line (observation
// values, then action values). Values round-trip bit-exactly.
inline void save_dataset(const Dataset& data, std::ostream& out) {
  out << "dims " << data.obs_dim() << ' ' << data.act_dim() << '\n';
  for (const LabeledPair& p : data.pairs()) {
    bool first = true;
    for (double v : p.obs.values) {
      out << (first ? "" : " ") << format_double(v);
      first = false;
    }
    for (double v : p.label.values) out << ' ' << format_double(v);
    out << '\n';
  }
}

inline void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_dataset: cannot open " + path);
  save_dataset(data, out);
}

inline Dataset load_dataset(std::istream& in) {
  std::string tag;
  int obs_dim = 0, act_dim = 0;
  in >> tag >> obs_dim >> act_dim;
  if (tag != "dims" || obs_dim < 0 || act_dim < 0)
    throw ConfigError("load_dataset: bad header");
  Dataset data;
  for (;;) {
    LabeledPair pair;
    pair.obs.values.resize(obs_dim);
    pair.label.values.resize(act_dim);
    for (double& v : pair.obs.values)
      if (!(in >> v)) return data;
    for (double& v : pair.label.values)
      if (!(in >> v)) throw ConfigError("load_dataset: truncated pair");
    data.append(std::move(pair));
  }
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_dataset: cannot open " + path);
  return load_dataset(in);
}

}  // namespace daglab
