#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dolha/types.hpp"

namespace dolha {

/// Synthetic edge streams for tests and benchmarks.
struct GeneratorConfig {
  std::size_t vertices = 100;
  std::size_t events = 1000;
  /// Probability that an event reuses an already emitted key.
  double repeat_ratio = 0.2;
  /// Probability that an event is a negative delta on an emitted key.
  double negative_ratio = 0.1;
  /// Never drive a key's running total below zero.
  bool bounded_negatives = false;
  /// Pick endpoints from a Zipf-like distribution instead of uniformly.
  bool power_law = false;
  double exponent = 1.5;
  /// Largest positive delta; negative deltas go down to -max_weight.
  Weight max_weight = 3;
  /// Timestamps advance by 0..max_step per event, starting at 1.
  Timestamp max_step = 2;
  bool allow_self_loops = false;
  std::uint64_t seed = 1;
};

inline std::string vertex_name(std::size_t i) { return "v" + std::to_string(i); }

inline std::vector<StreamEdge> generate_stream(const GeneratorConfig& cfg) {
  std::vector<StreamEdge> out;
  out.reserve(cfg.events);
  if (cfg.vertices == 0 || cfg.events == 0) return out;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Weight> magnitude(1, std::max<Weight>(cfg.max_weight, 1));
  std::uniform_int_distribution<Timestamp> step(0, cfg.max_step);

  std::vector<double> zipf;
  if (cfg.power_law) {
    zipf.resize(cfg.vertices);
    for (std::size_t i = 0; i < cfg.vertices; ++i)
      zipf[i] = 1.0 / std::pow(static_cast<double>(i + 1), cfg.exponent);
  }
  std::discrete_distribution<std::size_t> skewed(zipf.begin(), zipf.end());
  std::uniform_int_distribution<std::size_t> flat(0, cfg.vertices - 1);
  auto pick = [&] { return cfg.power_law ? skewed(rng) : flat(rng); };

  std::vector<EdgeKey> keys;
  std::map<EdgeKey, Weight> total;
  Timestamp t = 1;
  for (std::size_t n = 0; n < cfg.events; ++n) {
    t += n == 0 ? 0 : step(rng);
    const double r = coin(rng);
    EdgeKey key;
    Weight w = magnitude(rng);
    if (!keys.empty() && r < cfg.negative_ratio) {
      key = keys[std::uniform_int_distribution<std::size_t>(0, keys.size() - 1)(rng)];
      w = -w;
      if (cfg.bounded_negatives) {
        Weight& cur = total[key];
        if (cur <= 0)
          w = -w;
        else
          w = std::max(w, -cur);
      }
    } else if (!keys.empty() && r < cfg.negative_ratio + cfg.repeat_ratio) {
      key = keys[std::uniform_int_distribution<std::size_t>(0, keys.size() - 1)(rng)];
    } else {
      std::size_t a = pick(), b = pick();
      if (!cfg.allow_self_loops && cfg.vertices > 1)
        while (b == a) b = pick();
      key = {vertex_name(a), vertex_name(b)};
      if (!total.contains(key)) keys.push_back(key);
    }
    total[key] += w;
    out.push_back({std::move(key), t, w});
  }
  return out;
}

}  // namespace dolha
