#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "dolha/types.hpp"

// Reference implementations for tests and benchmarks. Nothing here includes
// the store headers: answers come from plain maps and full replays.

namespace dolha::oracle {

struct EdgeState {
  Weight w = 0;
  Timestamp t = 0;
  std::uint64_t seq = 0;  // position in the log of the last update
  friend bool operator==(const EdgeState&, const EdgeState&) = default;
};

struct VertexState {
  Weight w_out = 0, w_in = 0;
  std::uint64_t d_out = 0, d_in = 0;
  friend bool operator==(const VertexState&, const VertexState&) = default;
};

struct Row {
  VertexId id;
  Weight w = 0;
  Timestamp t = 0;
  friend bool operator==(const Row&, const Row&) = default;
};

/// How a running total reacts to non-positive values.
enum class Semantics {
  /// W^t(e) = sum of every delta with t_j <= t, exactly as written.
  Literal,
  /// An edge whose total drops to zero or below is forgotten; a
  /// non-positive delta on a forgotten edge is ignored.
  Clamped,
};

/// A graph state: every present edge with its total weight and last update.
class Snapshot {
 public:
  explicit Snapshot(std::map<EdgeKey, EdgeState> edges) : edges_(std::move(edges)) {}

  const std::map<EdgeKey, EdgeState>& edges() const { return edges_; }

  std::optional<EdgeState> edge(const EdgeKey& k) const {
    auto it = edges_.find(k);
    if (it == edges_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<VertexState> vertex(const VertexId& u) const {
    VertexState s;
    bool seen = false;
    for (const auto& [k, e] : edges_) {
      if (k.src == u) s.w_out += e.w, ++s.d_out, seen = true;
      if (k.dst == u) s.w_in += e.w, ++s.d_in, seen = true;
    }
    if (!seen) return std::nullopt;
    return s;
  }

  /// Outgoing edges ordered by last update.
  std::vector<Row> successors(const VertexId& u) const { return rows(u, true); }
  std::vector<Row> precursors(const VertexId& v) const { return rows(v, false); }

  std::set<VertexId> vertices() const {
    std::set<VertexId> out;
    for (const auto& [k, e] : edges_) out.insert(k.src), out.insert(k.dst);
    return out;
  }

  /// vertex(u) for every present vertex, in one pass.
  std::map<VertexId, VertexState> all_vertices() const {
    std::map<VertexId, VertexState> out;
    for (const auto& [k, e] : edges_) {
      VertexState& a = out[k.src];
      a.w_out += e.w;
      ++a.d_out;
      VertexState& b = out[k.dst];
      b.w_in += e.w;
      ++b.d_in;
    }
    return out;
  }

  /// successors(u) (or precursors) for every present vertex, in one pass.
  std::map<VertexId, std::vector<Row>> all_rows(bool outgoing) const {
    std::map<VertexId, std::vector<std::pair<std::uint64_t, Row>>> tmp;
    for (const auto& [k, e] : edges_) {
      const auto& [self, other] = outgoing ? std::tie(k.src, k.dst) : std::tie(k.dst, k.src);
      tmp[self].push_back({e.seq, {other, e.w, e.t}});
    }
    std::map<VertexId, std::vector<Row>> out;
    for (auto& [v, rows] : tmp) {
      std::ranges::sort(rows, {}, &std::pair<std::uint64_t, Row>::first);
      for (auto& [seq, r] : rows) out[v].push_back(std::move(r));
    }
    return out;
  }

 private:
  std::vector<Row> rows(const VertexId& x, bool outgoing) const {
    std::vector<std::pair<std::uint64_t, Row>> tmp;
    for (const auto& [k, e] : edges_) {
      if ((outgoing ? k.src : k.dst) != x) continue;
      tmp.push_back({e.seq, {outgoing ? k.dst : k.src, e.w, e.t}});
    }
    std::ranges::sort(tmp, {}, &std::pair<std::uint64_t, Row>::first);
    std::vector<Row> out;
    for (auto& [seq, r] : tmp) out.push_back(std::move(r));
    return out;
  }

  std::map<EdgeKey, EdgeState> edges_;
};

/// Window parameters, restated here so the oracle does not depend on the
/// store headers. Window i covers (t0 + i*slide, t0 + i*slide + length].
struct Window {
  Timestamp length = 0;
  Timestamp slide = 0;
  Timestamp t0 = 0;

  Timestamp start(std::uint64_t i) const { return t0 + i * slide; }
  Timestamp end(std::uint64_t i) const { return t0 + i * slide + length; }
  bool contains(std::uint64_t i, Timestamp t) const {
    return t <= end(i) && (i == 0 || t > start(i));
  }
};

/// The raw event log, queried by full replay.
class OracleGraph {
 public:
  explicit OracleGraph(Semantics s = Semantics::Clamped) : semantics_(s) {}

  void append(const StreamEdge& e) { log_.push_back(e); }
  void append(std::span<const StreamEdge> es) {
    log_.insert(log_.end(), es.begin(), es.end());
  }

  const std::vector<StreamEdge>& log() const { return log_; }
  Semantics semantics() const { return semantics_; }

  /// State after the first `n` logged events.
  Snapshot after(std::size_t n) const {
    return replay(std::min(n, log_.size()));
  }

  /// State at time t: every event with t_j <= t.
  Snapshot at(Timestamp t) const {
    std::size_t n = 0;
    while (n < log_.size() && log_[n].t <= t) ++n;
    return replay(n);
  }

  Snapshot latest() const { return replay(log_.size()); }

  /// Events whose timestamp falls in window i.
  std::vector<StreamEdge> window_filter(const Window& w, std::uint64_t i) const {
    std::vector<StreamEdge> out;
    for (const auto& e : log_)
      if (w.contains(i, e.t)) out.push_back(e);
    return out;
  }

 private:
  Snapshot replay(std::size_t n) const {
    std::map<EdgeKey, EdgeState> sum;
    for (std::size_t i = 0; i < n; ++i) {
      const StreamEdge& e = log_[i];
      auto it = sum.find(e.key);
      if (semantics_ == Semantics::Clamped) {
        if (it == sum.end()) {
          if (e.w > 0) sum[e.key] = {e.w, e.t, i};
          continue;
        }
        it->second.w += e.w;
        it->second.t = e.t;
        it->second.seq = i;
        if (it->second.w <= 0) sum.erase(it);
      } else {
        EdgeState& s = sum[e.key];
        s.w += e.w;
        s.t = e.t;
        s.seq = i;
      }
    }
    std::erase_if(sum, [](const auto& kv) { return kv.second.w <= 0; });
    return Snapshot(std::move(sum));
  }

  Semantics semantics_;
  std::vector<StreamEdge> log_;
};

/// One retained occurrence in the windowed replay.
struct Retained {
  Timestamp t = 0;
  Weight delta = 0;
  std::uint64_t seq = 0;
  friend bool operator==(const Retained&, const Retained&) = default;
};

/// Windowed retention, replayed with per-key queues of raw deltas.
///
/// Rules: an arrival for a key with nothing retained and a non-positive delta
/// is dropped. Sliding to window i drops every occurrence with t <= start(i),
/// oldest first; whenever that leaves a key whose running sums are all
/// non-positive, the key is dropped entirely. The weight of an occurrence is
/// the sum of the retained deltas up to it.
class WindowReplay {
 public:
  explicit WindowReplay(std::optional<Window> w) : window_(w) {}

  /// Slides as needed, then applies `e`. Returns false if `e` was dropped.
  bool ingest(const StreamEdge& e) {
    advance(e.t);
    auto& q = keys_[e.key];
    if (q.empty() && e.w <= 0) {
      keys_.erase(e.key);
      ++seq_;
      return false;
    }
    q.push_back({e.t, e.w, seq_++});
    return true;
  }

  void advance(Timestamp t) {
    if (!window_) return;
    while (t > window_->end(ordinal_)) slide();
  }

  void slide() {
    ++ordinal_;
    const Timestamp cut = window_->start(ordinal_);
    for (auto it = keys_.begin(); it != keys_.end();) {
      auto& q = it->second;
      while (!q.empty() && q.front().t <= cut) {
        q.pop_front();
        if (!q.empty() && all_non_positive(q)) q.clear();
      }
      it = q.empty() ? keys_.erase(it) : std::next(it);
    }
  }

  std::uint64_t ordinal() const { return ordinal_; }

  /// (t, cumulative weight) per retained occurrence, oldest first.
  std::vector<std::pair<Timestamp, Weight>> history(const EdgeKey& k) const {
    std::vector<std::pair<Timestamp, Weight>> out;
    auto it = keys_.find(k);
    if (it == keys_.end()) return out;
    Weight sum = 0;
    for (const auto& r : it->second) out.emplace_back(r.t, sum += r.delta);
    return out;
  }

  std::optional<std::pair<Timestamp, Weight>> latest(const EdgeKey& k) const {
    auto h = history(k);
    if (h.empty()) return std::nullopt;
    return h.back();
  }

  std::optional<VertexState> vertex(const VertexId& u) const {
    VertexState s;
    bool seen = false;
    for (const auto& [k, q] : keys_) {
      const Weight w = total(q);
      if (k.src == u) s.w_out += w, ++s.d_out, seen = true;
      if (k.dst == u) s.w_in += w, ++s.d_in, seen = true;
    }
    if (!seen) return std::nullopt;
    return s;
  }

  /// One row per neighbor key, ordered by its latest occurrence.
  std::vector<Row> successors_latest(const VertexId& u) const {
    return latest_rows(u, true);
  }
  std::vector<Row> precursors_latest(const VertexId& v) const {
    return latest_rows(v, false);
  }

  /// Every retained occurrence, ordered by arrival.
  std::vector<Row> successors_history(const VertexId& u) const {
    return history_rows(u, true);
  }
  std::vector<Row> precursors_history(const VertexId& v) const {
    return history_rows(v, false);
  }

  /// Retained occurrences as raw events, in arrival order.
  std::vector<StreamEdge> retained_events() const {
    std::vector<std::pair<std::uint64_t, StreamEdge>> tmp;
    for (const auto& [k, q] : keys_)
      for (const auto& r : q) tmp.push_back({r.seq, {k, r.t, r.delta}});
    std::ranges::sort(tmp, {}, &std::pair<std::uint64_t, StreamEdge>::first);
    std::vector<StreamEdge> out;
    for (auto& [s, e] : tmp) out.push_back(std::move(e));
    return out;
  }

  std::size_t occurrence_count() const {
    std::size_t n = 0;
    for (const auto& [k, q] : keys_) n += q.size();
    return n;
  }
  std::size_t key_count() const { return keys_.size(); }

  std::set<VertexId> vertices() const {
    std::set<VertexId> out;
    for (const auto& [k, q] : keys_) out.insert(k.src), out.insert(k.dst);
    return out;
  }

  const std::map<EdgeKey, std::deque<Retained>>& keys() const { return keys_; }

  /// vertex(u) for every retained vertex, in one pass.
  std::map<VertexId, VertexState> all_vertices() const {
    std::map<VertexId, VertexState> out;
    for (const auto& [k, q] : keys_) {
      const Weight w = total(q);
      VertexState& a = out[k.src];
      a.w_out += w;
      ++a.d_out;
      VertexState& b = out[k.dst];
      b.w_in += w;
      ++b.d_in;
    }
    return out;
  }

  /// The latest (or full history) rows of every vertex, in one pass.
  std::map<VertexId, std::vector<Row>> all_rows(bool outgoing, bool history) const {
    std::map<VertexId, std::vector<std::pair<std::uint64_t, Row>>> tmp;
    for (const auto& [k, q] : keys_) {
      const auto& [self, other] = outgoing ? std::tie(k.src, k.dst) : std::tie(k.dst, k.src);
      auto& rows = tmp[self];
      if (history) {
        Weight sum = 0;
        for (const auto& r : q) rows.push_back({r.seq, {other, sum += r.delta, r.t}});
      } else {
        rows.push_back({q.back().seq, {other, total(q), q.back().t}});
      }
    }
    std::map<VertexId, std::vector<Row>> out;
    for (auto& [v, rows] : tmp) {
      std::ranges::sort(rows, {}, &std::pair<std::uint64_t, Row>::first);
      for (auto& [seq, r] : rows) out[v].push_back(std::move(r));
    }
    return out;
  }

 private:
  static bool all_non_positive(const std::deque<Retained>& q) {
    Weight sum = 0;
    for (const auto& r : q)
      if ((sum += r.delta) > 0) return false;
    return true;
  }

  static Weight total(const std::deque<Retained>& q) {
    Weight sum = 0;
    for (const auto& r : q) sum += r.delta;
    return sum;
  }

  std::vector<Row> latest_rows(const VertexId& x, bool outgoing) const {
    std::vector<std::pair<std::uint64_t, Row>> tmp;
    for (const auto& [k, q] : keys_) {
      if ((outgoing ? k.src : k.dst) != x) continue;
      tmp.push_back({q.back().seq, {outgoing ? k.dst : k.src, total(q), q.back().t}});
    }
    std::ranges::sort(tmp, {}, &std::pair<std::uint64_t, Row>::first);
    std::vector<Row> out;
    for (auto& [s, r] : tmp) out.push_back(std::move(r));
    return out;
  }

  std::vector<Row> history_rows(const VertexId& x, bool outgoing) const {
    std::vector<std::pair<std::uint64_t, Row>> tmp;
    for (const auto& [k, q] : keys_) {
      if ((outgoing ? k.src : k.dst) != x) continue;
      Weight sum = 0;
      for (const auto& r : q)
        tmp.push_back({r.seq, {outgoing ? k.dst : k.src, sum += r.delta, r.t}});
    }
    std::ranges::sort(tmp, {}, &std::pair<std::uint64_t, Row>::first);
    std::vector<Row> out;
    for (auto& [s, r] : tmp) out.push_back(std::move(r));
    return out;
  }

  std::optional<Window> window_;
  std::uint64_t ordinal_ = 0;
  std::uint64_t seq_ = 0;
  std::map<EdgeKey, std::deque<Retained>> keys_;
};

/// Brute-force directed 3-cycles over three distinct vertices, each reported
/// as (a, b, c) with a the smallest id.
inline std::set<std::tuple<VertexId, VertexId, VertexId>> triangles(
    const Snapshot& g) {
  std::map<VertexId, std::set<VertexId>> adj;
  for (const auto& [k, e] : g.edges()) adj[k.src].insert(k.dst);
  auto has = [&](const VertexId& a, const VertexId& b) {
    auto it = adj.find(a);
    return it != adj.end() && it->second.contains(b);
  };
  std::set<std::tuple<VertexId, VertexId, VertexId>> out;
  const auto vs = g.vertices();
  for (const auto& a : vs)
    for (const auto& b : vs)
      for (const auto& c : vs)
        if (a < b && a < c && b != c && has(a, b) && has(b, c) && has(c, a))
          out.emplace(a, b, c);
  return out;
}

/// Adjacency lists in a hash map: per-vertex neighbor lists sorted by id,
/// binary-searched on every update, plus a per-edge time line.
class BaselineAdjList {
 public:
  struct Adj {
    VertexId id;
    Weight w = 0;
    Timestamp t = 0;
  };
  struct Entry {
    std::vector<Adj> out, in;
    Weight w_out = 0, w_in = 0;
  };

  void ingest(const StreamEdge& e) {
    if (last_t_ && e.t < *last_t_) throw OrderError(e.t, *last_t_);
    last_t_ = e.t;
    timeline_[e.key].emplace_back(e.t, e.w);

    auto su = vertices_.find(e.key.src);
    Adj* cur = nullptr;
    if (su != vertices_.end()) {
      auto& out = su->second.out;
      auto it = lower(out, e.key.dst);
      if (it != out.end() && it->id == e.key.dst) cur = &*it;
    }
    if (!cur) {
      if (e.w <= 0) return;
      Entry& a = vertices_[e.key.src];
      insert(a.out, {e.key.dst, e.w, e.t});
      a.w_out += e.w;
      Entry& b = vertices_[e.key.dst];
      insert(b.in, {e.key.src, e.w, e.t});
      b.w_in += e.w;
      return;
    }
    const Weight before = cur->w;
    Entry& a = su->second;
    Entry& b = vertices_[e.key.dst];
    Adj& back = *lower(b.in, e.key.src);
    if (before + e.w > 0) {
      cur->w = back.w = before + e.w;
      cur->t = back.t = e.t;
      a.w_out += e.w;
      b.w_in += e.w;
      return;
    }
    a.w_out -= before;
    b.w_in -= before;
    a.out.erase(lower(a.out, e.key.dst));
    b.in.erase(lower(b.in, e.key.src));
    if (b.out.empty() && b.in.empty()) vertices_.erase(e.key.dst);
    auto again = vertices_.find(e.key.src);
    if (again != vertices_.end() && again->second.out.empty() &&
        again->second.in.empty())
      vertices_.erase(again);
  }

  std::optional<std::pair<Weight, Timestamp>> edge_query(const EdgeKey& k) const {
    auto su = vertices_.find(k.src);
    if (su == vertices_.end()) return std::nullopt;
    auto& out = su->second.out;
    auto it = std::ranges::lower_bound(out, k.dst, {}, &Adj::id);
    if (it == out.end() || it->id != k.dst) return std::nullopt;
    return std::pair{it->w, it->t};
  }

  const Entry* vertex_query(const VertexId& u) const {
    auto it = vertices_.find(u);
    return it == vertices_.end() ? nullptr : &it->second;
  }

  /// Every (t, delta) ever seen for the key.
  const std::vector<std::pair<Timestamp, Weight>>* history(const EdgeKey& k) const {
    auto it = timeline_.find(k);
    return it == timeline_.end() ? nullptr : &it->second;
  }

  std::size_t vertex_count() const { return vertices_.size(); }

 private:
  static std::vector<Adj>::iterator lower(std::vector<Adj>& v, const VertexId& id) {
    return std::ranges::lower_bound(v, id, {}, &Adj::id);
  }
  static void insert(std::vector<Adj>& v, Adj a) {
    v.insert(lower(v, a.id), std::move(a));
  }

  std::unordered_map<VertexId, Entry> vertices_;
  std::map<EdgeKey, std::vector<std::pair<Timestamp, Weight>>> timeline_;
  std::optional<Timestamp> last_t_;
};

}  // namespace dolha::oracle
