#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dolha/persistent_store.hpp"
#include "dolha/snapshot_store.hpp"
#include "dolha/stream_io.hpp"
#include "dolha/types.hpp"

namespace dolha {

// ---------------------------------------------------------------------------
// Directed triangles on the snapshot store.

/// Directed 3-cycle a -> b -> c -> a, rotated so `a` is the smallest id.
struct Triangle {
  VertexId a, b, c;

  static Triangle make(VertexId x, VertexId y, VertexId z) {
    if (y < x && y < z) return {std::move(y), std::move(z), std::move(x)};
    if (z < x && z < y) return {std::move(z), std::move(x), std::move(y)};
    return {std::move(x), std::move(y), std::move(z)};
  }

  EdgeKey e1() const { return {a, b}; }
  EdgeKey e2() const { return {b, c}; }
  EdgeKey e3() const { return {c, a}; }

  friend auto operator<=>(const Triangle&, const Triangle&) = default;
  friend bool operator==(const Triangle&, const Triangle&) = default;
};

/// All directed 3-cycles through the live edge u -> v on three distinct
/// vertices. Scans the smaller of u's precursors and v's successors and
/// probes the closing edge.
template <class H>
std::vector<Triangle> triangles_for_edge(const BasicSnapshotStore<H>& s,
                                         const EdgeKey& key) {
  std::vector<Triangle> out;
  if (key.src == key.dst) return out;
  const Index u = s.find_vertex(key.src);
  const Index v = s.find_vertex(key.dst);
  if (u == kNil || v == kNil || s.find_edge(u, v) == kNil) return out;

  const auto& vt = s.vertices();
  const auto& edges = s.edges();
  if (vt[u].d_in <= vt[v].d_out) {
    s.template for_each_edge<Dir::In>(u, [&](Index e) {
      const Index j = edges[e].src;
      if (j != u && j != v && s.find_edge(v, j) != kNil)
        out.push_back(Triangle::make(key.src, key.dst, vt[j].id));
    });
  } else {
    s.template for_each_edge<Dir::Out>(v, [&](Index e) {
      const Index j = edges[e].dst;
      if (j != u && j != v && s.find_edge(j, u) != kNil)
        out.push_back(Triangle::make(key.src, key.dst, vt[j].id));
    });
  }
  std::ranges::sort(out);
  return out;
}

/// Ingests each event and reports the triangles through its edge, if the
/// edge is still live afterwards. One entry per event.
template <class H>
std::vector<std::vector<Triangle>> continuous_triangles(
    BasicSnapshotStore<H>& s, std::span<const StreamEdge> stream) {
  std::vector<std::vector<Triangle>> out;
  out.reserve(stream.size());
  for (const StreamEdge& e : stream) {
    const EdgeOutcome o = s.process_edge(e);
    if (o == EdgeOutcome::Inserted || o == EdgeOutcome::Updated)
      out.push_back(triangles_for_edge(s, e.key));
    else
      out.emplace_back();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Candidate subgraphs of the persistent store.

struct CandidateEdge {
  EdgeKey key;
  Weight w = 0;
  Timestamp t = 0;
  friend bool operator==(const CandidateEdge&, const CandidateEdge&) = default;
};

/// Edges whose latest occurrence up to t' lies in [t, t'] with positive
/// cumulative weight. Edges are in chronological order.
struct CandidateSubgraph {
  std::vector<VertexId> vertices;  // sorted
  std::vector<CandidateEdge> edges;
  std::unordered_map<VertexId, std::vector<std::size_t>> out, in;

  bool has_edge(const VertexId& src, const VertexId& dst) const {
    auto it = out.find(src);
    if (it == out.end()) return false;
    return std::ranges::any_of(it->second,
                               [&](std::size_t i) { return edges[i].key.dst == dst; });
  }

  std::set<EdgeKey> key_set() const {
    std::set<EdgeKey> keys;
    for (const auto& e : edges) keys.insert(e.key);
    return keys;
  }
};

namespace detail {

// Newest-first scan of ring positions [lo, hi); returns the first occurrence
// of each key seen, oldest first.
template <class H>
std::vector<Index> latest_in_range(const BasicPersistentStore<H>& s,
                                   Timestamp t, Timestamp t_end) {
  if (t > t_end)
    throw UsageError("time range start " + std::to_string(t) +
                     " is after its end " + std::to_string(t_end));
  const std::size_t lo = s.lower_position(t);
  const std::size_t hi = s.upper_position(t_end);
  const auto& ring = s.edges();
  std::unordered_set<std::uint64_t> seen;
  std::vector<Index> picked;
  for (std::size_t k = hi; k-- > lo;) {
    const Index e = s.physical(k);
    const auto& c = ring[e];
    if (!c.occupied()) continue;
    const std::uint64_t key = (std::uint64_t{c.src} << 32) | c.dst;
    if (!seen.insert(key).second) continue;
    if (c.w > 0) picked.push_back(e);
  }
  std::ranges::reverse(picked);
  return picked;
}

}  // namespace detail

template <class H>
CandidateSubgraph extract_candidate(const BasicPersistentStore<H>& s,
                                    Timestamp t, Timestamp t_end) {
  CandidateSubgraph g;
  const auto& ring = s.edges();
  const auto& vt = s.vertices();
  std::set<VertexId> vs;
  for (Index e : detail::latest_in_range(s, t, t_end)) {
    const auto& c = ring[e];
    CandidateEdge ce{{vt[c.src].id, vt[c.dst].id}, c.w, c.t};
    g.out[ce.key.src].push_back(g.edges.size());
    g.in[ce.key.dst].push_back(g.edges.size());
    vs.insert(ce.key.src);
    vs.insert(ce.key.dst);
    g.edges.push_back(std::move(ce));
  }
  g.vertices.assign(vs.begin(), vs.end());
  return g;
}

/// Same edge set as extract_candidate, loaded into a fresh snapshot store
/// sized to the range.
template <class H>
BasicSnapshotStore<H> extract_candidate_store(const BasicPersistentStore<H>& s,
                                              Timestamp t, Timestamp t_end) {
  const auto picked = detail::latest_in_range(s, t, t_end);
  const std::size_t n = std::max<std::size_t>(picked.size(), 1);
  BasicSnapshotStore<H> out(2 * n, n, s.hasher(), StoreOptions{false});
  const auto& ring = s.edges();
  const auto& vt = s.vertices();
  for (Index e : picked) {
    const auto& c = ring[e];
    out.process_edge({{vt[c.src].id, vt[c.dst].id}, c.t, c.w});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time-constrained pattern queries.

/// Pattern text format:
///   vertex NAME LABEL     (LABEL `*` matches any data vertex)
///   edge NAME NAME
///   window T T'
/// Data vertices are labelled by their id.
struct PatternGraph {
  struct Vertex {
    std::string name;
    std::string label;
    bool wildcard() const { return label == "*"; }
  };

  std::vector<Vertex> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  Timestamp t_begin = 0;
  Timestamp t_end = 0;

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].name == name) return i;
    return std::nullopt;
  }

  /// Throws UsageError unless the pattern is non-empty, weakly connected and
  /// its window satisfies t < t'.
  void validate() const {
    if (vertices.empty()) throw UsageError("pattern has no vertices");
    if (t_begin >= t_end) throw UsageError("pattern window needs t < t'");
    std::vector<std::size_t> parent(vertices.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto root = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto [a, b] : edges) parent[root(a)] = root(b);
    for (std::size_t i = 1; i < vertices.size(); ++i)
      if (root(i) != root(0)) throw UsageError("pattern is not connected");
  }

  static PatternGraph parse(std::istream& in) {
    PatternGraph p;
    bool have_window = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto f = detail::split_fields(line);
      if (f.empty() || f[0].front() == '#') continue;
      if (f[0] == "vertex" && f.size() == 3) {
        if (p.index_of(f[1]))
          throw ParseError(line_no, "duplicate pattern vertex `" + std::string(f[1]) + "`");
        p.vertices.push_back({std::string(f[1]), std::string(f[2])});
      } else if (f[0] == "edge" && f.size() == 3) {
        auto a = p.index_of(f[1]);
        auto b = p.index_of(f[2]);
        if (!a || !b) throw ParseError(line_no, "edge names an undeclared vertex");
        p.edges.emplace_back(*a, *b);
      } else if (f[0] == "window" && f.size() == 3) {
        if (!detail::parse_number(f[1], p.t_begin) ||
            !detail::parse_number(f[2], p.t_end))
          throw ParseError(line_no, "bad window bounds");
        have_window = true;
      } else {
        throw ParseError(line_no, "unrecognised pattern line");
      }
    }
    if (!have_window) throw ParseError(line_no, "pattern has no window line");
    return p;
  }

  static PatternGraph load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open pattern file " + path);
    return parse(in);
  }
};

/// Data vertex assigned to each pattern vertex, in pattern vertex order.
using Embedding = std::vector<VertexId>;

/// Injective, label-respecting embeddings of `p` into `g` (every pattern
/// edge must map onto a candidate edge). Sorted.
inline std::vector<Embedding> match_pattern(const CandidateSubgraph& g,
                                            const PatternGraph& p) {
  const std::size_t n = p.vertices.size();
  std::vector<Embedding> out;
  if (n == 0) return out;

  auto fits = [&](std::size_t x, const VertexId& v) {
    return p.vertices[x].wildcard() || p.vertices[x].label == v;
  };
  std::vector<std::size_t> pool_size(n, 0);
  for (std::size_t x = 0; x < n; ++x)
    pool_size[x] = std::ranges::count_if(g.vertices, [&](const VertexId& v) {
      return fits(x, v);
    });

  // Match order: smallest pool first, then always a vertex adjacent to the
  // ones already placed, again preferring small pools.
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  auto adjacent = [&](std::size_t x) {
    return std::ranges::any_of(p.edges, [&](auto e) {
      return (e.first == x && placed[e.second]) || (e.second == x && placed[e.first]);
    });
  };
  while (order.size() < n) {
    std::optional<std::size_t> best;
    for (std::size_t x = 0; x < n; ++x) {
      if (placed[x] || (!order.empty() && !adjacent(x))) continue;
      if (!best || pool_size[x] < pool_size[*best]) best = x;
    }
    if (!best)
      for (std::size_t x = 0; x < n && !best; ++x)
        if (!placed[x]) best = x;
    placed[*best] = true;
    order.push_back(*best);
  }

  Embedding map(n);
  std::vector<bool> mapped(n, false);
  std::unordered_set<VertexId> used;

  auto consistent = [&](std::size_t x, const VertexId& v) {
    for (auto [a, b] : p.edges) {
      if (a == x && b == x) {
        if (!g.has_edge(v, v)) return false;
      } else if (a == x && mapped[b]) {
        if (!g.has_edge(v, map[b])) return false;
      } else if (b == x && mapped[a]) {
        if (!g.has_edge(map[a], v)) return false;
      }
    }
    return true;
  };

  auto candidates = [&](std::size_t x) {
    for (auto [a, b] : p.edges) {
      std::vector<VertexId> c;
      if (b == x && a != x && mapped[a]) {
        if (auto it = g.out.find(map[a]); it != g.out.end())
          for (std::size_t i : it->second) c.push_back(g.edges[i].key.dst);
        return c;
      }
      if (a == x && b != x && mapped[b]) {
        if (auto it = g.in.find(map[b]); it != g.in.end())
          for (std::size_t i : it->second) c.push_back(g.edges[i].key.src);
        return c;
      }
    }
    return g.vertices;
  };

  auto search = [&](auto&& self, std::size_t depth) -> void {
    if (depth == n) {
      out.push_back(map);
      return;
    }
    const std::size_t x = order[depth];
    for (const VertexId& v : candidates(x)) {
      if (used.contains(v) || !fits(x, v) || !consistent(x, v)) continue;
      map[x] = v;
      mapped[x] = true;
      used.insert(v);
      self(self, depth + 1);
      used.erase(v);
      mapped[x] = false;
    }
  };
  search(search, 0);
  std::ranges::sort(out);
  return out;
}

template <class H>
std::vector<Embedding> pattern_match(const BasicPersistentStore<H>& s,
                                     const PatternGraph& p) {
  p.validate();
  return match_pattern(extract_candidate(s, p.t_begin, p.t_end), p);
}

// ---------------------------------------------------------------------------
// Structure-constrained time queries.

struct Interval {
  Timestamp start = 0;
  Timestamp end = 0;
  friend auto operator<=>(const Interval&, const Interval&) = default;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Maximal periods in which every key in `q` has positive cumulative weight.
/// An interval opens at the first q-edge occurrence where all keys are alive
/// and ends at the last such occurrence before some key dies.
template <class H>
std::vector<Interval> structure_time_query(const BasicPersistentStore<H>& s,
                                           std::span<const EdgeKey> q) {
  if (q.empty()) throw UsageError("structure time query needs at least one edge");
  if (std::set<EdgeKey>(q.begin(), q.end()).size() != q.size())
    throw UsageError("structure time query edges must be distinct");

  struct Step {
    Timestamp t;
    std::size_t key;
    Weight w;
  };
  std::vector<Step> steps;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Index latest = s.find_latest(q[k].src, q[k].dst);
    if (latest == kNil) return {};
    const std::size_t first = steps.size();
    for (Index e = latest; e != kNil; e = s.edges()[e].time_prev)
      steps.push_back({s.edges()[e].t, k, s.edges()[e].w});
    std::reverse(steps.begin() + static_cast<std::ptrdiff_t>(first), steps.end());
  }
  std::ranges::stable_sort(steps, {}, &Step::t);

  std::vector<Interval> out;
  std::vector<bool> alive(q.size(), false);
  std::size_t alive_count = 0;
  std::optional<Interval> open;
  for (std::size_t i = 0; i < steps.size();) {
    const Timestamp t = steps[i].t;
    for (; i < steps.size() && steps[i].t == t; ++i) {
      const bool now = steps[i].w > 0;
      if (now != alive[steps[i].key]) {
        alive[steps[i].key] = now;
        now ? ++alive_count : --alive_count;
      }
    }
    if (alive_count == q.size()) {
      if (!open) open = Interval{t, t};
      open->end = t;
    } else if (open) {
      out.push_back(*open);
      open.reset();
    }
  }
  if (open) out.push_back(*open);
  return out;
}

}  // namespace dolha
