#pragma once

// Store-versus-oracle comparison shared by the property suite and the
// acceptance binary. Each check returns the first mismatch, or nullopt.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dolha.hpp"
#include "dolha/oracle.hpp"

namespace dolha::test {

using Mismatch = std::optional<std::string>;

inline std::string show(const std::vector<Neighbor>& v) {
  std::ostringstream os;
  for (const auto& n : v) os << '(' << n.id << ',' << n.w << ',' << n.t << ')';
  return os.str();
}

inline std::string show(const std::vector<oracle::Row>& v) {
  std::ostringstream os;
  for (const auto& n : v) os << '(' << n.id << ',' << n.w << ',' << n.t << ')';
  return os.str();
}

inline bool same(const std::vector<Neighbor>& a, const std::vector<oracle::Row>& b) {
  return std::ranges::equal(a, b, [](const Neighbor& x, const oracle::Row& y) {
    return x.id == y.id && x.w == y.w && x.t == y.t;
  });
}

inline bool same(const std::optional<VertexInfo>& a,
                 const std::optional<oracle::VertexState>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || (a->w_out == b->w_out && a->w_in == b->w_in && a->d_out == b->d_out &&
                a->d_in == b->d_in);
}

/// All four primitives, for every key in `keys` and every vertex in `vertices`.
template <class H>
Mismatch compare_snapshot(const BasicSnapshotStore<H>& s, const oracle::Snapshot& o,
                          const std::set<EdgeKey>& keys,
                          const std::set<VertexId>& vertices) {
  for (const auto& k : keys) {
    auto got = s.edge_query(k);
    auto want = o.edge(k);
    if (got.has_value() != want.has_value() ||
        (got && (got->w != want->w || got->t != want->t)))
      return "edge_query " + k.src + "->" + k.dst;
  }
  if (s.live_edges() != o.edges().size()) return std::string("live edge count");
  const auto agg = o.all_vertices();
  const auto outs = o.all_rows(true);
  const auto ins = o.all_rows(false);
  if (s.live_vertices() != agg.size()) return std::string("live vertex count");
  static const std::vector<oracle::Row> none;
  for (const auto& v : vertices) {
    auto a = agg.find(v);
    std::optional<oracle::VertexState> want;
    if (a != agg.end()) want = a->second;
    if (!same(s.vertex_query(v), want)) return "vertex_query " + v;
    auto so = outs.find(v);
    const auto& wo = so == outs.end() ? none : so->second;
    auto got_out = s.successors(v);
    if (!same(got_out, wo))
      return "successors " + v + ": " + show(got_out) + " vs " + show(wo);
    auto si = ins.find(v);
    const auto& wi = si == ins.end() ? none : si->second;
    auto got_in = s.precursors(v);
    if (!same(got_in, wi))
      return "precursors " + v + ": " + show(got_in) + " vs " + show(wi);
  }
  return std::nullopt;
}

/// Every stored occurrence as (key, t, delta); deltas are recovered from
/// consecutive cumulative weights.
template <class H>
std::multiset<std::tuple<EdgeKey, Timestamp, Weight>> recovered_events(
    const BasicPersistentStore<H>& s, const std::set<EdgeKey>& keys) {
  std::multiset<std::tuple<EdgeKey, Timestamp, Weight>> out;
  for (const auto& k : keys) {
    Weight prev = 0;
    for (const auto& occ : s.edge_history(k.src, k.dst)) {
      out.emplace(k, occ.t, occ.w - prev);
      prev = occ.w;
    }
  }
  return out;
}

template <class H>
Mismatch compare_window(const BasicPersistentStore<H>& s, const oracle::WindowReplay& r,
                        const std::set<EdgeKey>& keys,
                        const std::set<VertexId>& vertices) {
  for (const auto& k : keys) {
    auto got = s.edge_history(k.src, k.dst);
    auto want = r.history(k);
    bool eq = got.size() == want.size();
    for (std::size_t i = 0; eq && i < got.size(); ++i)
      eq = got[i].t == want[i].first && got[i].w == want[i].second;
    if (!eq) return "edge_history " + k.src + "->" + k.dst;
    auto latest = s.edge_latest(k.src, k.dst);
    if (latest.has_value() != !want.empty() ||
        (latest && (latest->t != want.back().first || latest->w != want.back().second)))
      return "edge_latest " + k.src + "->" + k.dst;
  }
  if (s.live_keys() != r.key_count()) return std::string("live key count");
  if (s.live_occurrences() != r.occurrence_count())
    return std::string("live occurrence count");
  const auto agg = r.all_vertices();
  if (s.live_vertices() != agg.size()) return std::string("live vertex count");
  const auto succ = r.all_rows(true, false), prec = r.all_rows(false, false);
  const auto succ_h = r.all_rows(true, true), prec_h = r.all_rows(false, true);
  static const std::vector<oracle::Row> none;
  auto rows = [](const auto& m, const VertexId& v) -> const std::vector<oracle::Row>& {
    auto it = m.find(v);
    return it == m.end() ? none : it->second;
  };
  for (const auto& v : vertices) {
    auto a = agg.find(v);
    std::optional<oracle::VertexState> want;
    if (a != agg.end()) want = a->second;
    if (!same(s.vertex_query(v), want)) return "vertex_query " + v;
    if (!same(s.successors_latest(v), rows(succ, v))) return "successors_latest " + v;
    if (!same(s.precursors_latest(v), rows(prec, v))) return "precursors_latest " + v;
    if (!same(s.successors_history(v), rows(succ_h, v)))
      return "successors_history " + v;
    if (!same(s.precursors_history(v), rows(prec_h, v)))
      return "precursors_history " + v;
  }
  return std::nullopt;
}

/// Stored occurrences must be a sub-multiset of the literal window filter,
/// and equal to it when the stream has no negative deltas.
template <class H>
Mismatch compare_window_filter(const BasicPersistentStore<H>& s,
                               const oracle::OracleGraph& log, const oracle::Window& w,
                               const std::set<EdgeKey>& keys, bool positive_only) {
  std::multiset<std::tuple<EdgeKey, Timestamp, Weight>> filter;
  for (const auto& e : log.window_filter(w, s.window_ordinal()))
    filter.emplace(e.key, e.t, e.w);
  const auto stored = recovered_events(s, keys);
  if (!std::ranges::includes(filter, stored))
    return std::string("stored occurrences not inside the window filter");
  if (positive_only && stored != filter)
    return std::string("stored occurrences differ from the window filter");
  return std::nullopt;
}

struct DifferentialConfig {
  std::size_t max_events = 10000;
  std::size_t max_vertices = 200;
  double repeat_ratio = 0.2;
  double negative_ratio = 0.1;
  std::size_t checkpoint = 100;
  /// Window length range, and slide range as a fraction of the length.
  Timestamp min_length = 20;
  Timestamp max_length = 420;
  double min_slide = 0.0;
  double max_slide = 1.0;
  bool audit = true;
};

struct DifferentialResult {
  std::size_t events = 0;
  std::size_t checks = 0;
  std::size_t slides = 0;
  std::size_t audits = 0;
  std::size_t audit_violations = 0;
  Mismatch failure;
};

inline std::set<VertexId> vertex_universe(std::size_t n) {
  std::set<VertexId> out{"absent"};
  for (std::size_t i = 0; i < n; ++i) out.insert(vertex_name(i));
  return out;
}

/// One seeded snapshot run. Even seeds keep every running total
/// non-negative and compare with the literal sum; odd seeds allow overdraw
/// and compare with the clamped replay.
inline DifferentialResult snapshot_differential(std::uint64_t seed,
                                                const DifferentialConfig& dc) {
  std::mt19937_64 rng(seed * 7919 + 1);
  GeneratorConfig g;
  g.vertices = 2 + rng() % (dc.max_vertices - 1);
  g.events = 1 + rng() % dc.max_events;
  g.repeat_ratio = dc.repeat_ratio;
  g.negative_ratio = dc.negative_ratio;
  g.bounded_negatives = seed % 2 == 0;
  g.power_law = rng() % 3 == 0;
  g.allow_self_loops = rng() % 4 == 0;
  g.seed = seed;
  const auto stream = generate_stream(g);

  DifferentialResult res;
  oracle::OracleGraph o(g.bounded_negatives ? oracle::Semantics::Literal
                                            : oracle::Semantics::Clamped);
  SnapshotStore s(1 + rng() % 64, 1 + rng() % 64, MurmurHasher(seed));
  const auto vertices = vertex_universe(g.vertices);
  std::set<EdgeKey> keys{{"absent", "v0"}};
  for (std::size_t i = 0; i < stream.size(); ++i) {
    s.process_edge(stream[i]);
    o.append(stream[i]);
    keys.insert(stream[i].key);
    ++res.events;
    if ((i + 1) % dc.checkpoint != 0 && i + 1 != stream.size()) continue;
    ++res.checks;
    if (auto m = compare_snapshot(s, o.after(i + 1), keys, vertices)) {
      res.failure = "seed " + std::to_string(seed) + " event " + std::to_string(i + 1) +
                    ": " + *m;
      return res;
    }
    if (dc.audit) {
      ++res.audits;
      if (auto v = audit(s); !v.empty()) {
        res.audit_violations += v.size();
        res.failure = "seed " + std::to_string(seed) + " audit: " + v.front();
        return res;
      }
    }
  }
  return res;
}

/// One seeded windowed run, compared after every slide and at the end.
inline DifferentialResult window_differential(std::uint64_t seed,
                                              const DifferentialConfig& dc) {
  std::mt19937_64 rng(seed * 104729 + 3);
  GeneratorConfig g;
  g.vertices = 2 + rng() % (dc.max_vertices - 1);
  g.events = 1 + rng() % dc.max_events;
  g.repeat_ratio = dc.repeat_ratio;
  g.negative_ratio = dc.negative_ratio;
  g.power_law = rng() % 3 == 0;
  g.allow_self_loops = rng() % 4 == 0;
  g.seed = seed;
  const bool positive_only = rng() % 4 == 0;
  if (positive_only) g.negative_ratio = 0;
  const auto stream = generate_stream(g);

  const Timestamp length =
      dc.min_length + rng() % (dc.max_length - dc.min_length + 1);
  const auto frac = [&](double f) {
    return std::clamp<Timestamp>(static_cast<Timestamp>(f * static_cast<double>(length)),
                                 1, length - 1);
  };
  const Timestamp lo = frac(dc.min_slide), hi = frac(dc.max_slide);
  const Timestamp slide = lo + rng() % (hi - lo + 1);
  const Timestamp t0 = rng() % 5;
  WindowConfig wc{length, slide, t0};
  oracle::Window ow{length, slide, t0};

  DifferentialResult res;
  PersistentStore s(1 + rng() % 32, 1 + rng() % 64, MurmurHasher(seed), wc);
  oracle::WindowReplay r(ow);
  oracle::OracleGraph log;
  const auto vertices = vertex_universe(g.vertices);
  std::set<EdgeKey> keys{{"absent", "v0"}};

  auto check = [&](const std::string& where) -> bool {
    ++res.checks;
    Mismatch m = compare_window(s, r, keys, vertices);
    if (!m) m = compare_window_filter(s, log, ow, keys, positive_only);
    if (dc.audit) {
      ++res.audits;
      if (auto v = audit(s); !v.empty()) {
        res.audit_violations += v.size();
        if (!m) m = "audit: " + v.front();
      }
    }
    if (m) res.failure = "seed " + std::to_string(seed) + " " + where + ": " + *m;
    return !m;
  };

  for (std::size_t i = 0; i < stream.size(); ++i) {
    // Compare the state right after any slide, before the triggering event.
    ExpiryReport rep = s.advance_clock(stream[i].t);
    r.advance(stream[i].t);
    if (rep.slides > 0) {
      res.slides += rep.slides;
      if (!check("after slide at event " + std::to_string(i + 1))) return res;
    }
    s.process_edge(stream[i]);
    r.ingest(stream[i]);
    log.append(stream[i]);
    keys.insert(stream[i].key);
    ++res.events;
  }
  check("end of stream");
  return res;
}

}  // namespace dolha::test
