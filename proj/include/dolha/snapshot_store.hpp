#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dolha/doll.hpp"
#include "dolha/hash.hpp"
#include "dolha/types.hpp"
#include "dolha/vertex_table.hpp"

namespace dolha {

struct StoreOptions {
  /// Double a full table (and rehash) instead of throwing CapacityError.
  bool allow_growth = true;
};

struct EdgeInfo {
  Weight w = 0;
  Timestamp t = 0;
  friend bool operator==(const EdgeInfo&, const EdgeInfo&) = default;
};

struct VertexInfo {
  Weight w_out = 0;
  Weight w_in = 0;
  std::uint64_t d_out = 0;
  std::uint64_t d_in = 0;
  friend bool operator==(const VertexInfo&, const VertexInfo&) = default;
};

/// One row of a successor / precursor answer.
struct Neighbor {
  VertexId id;
  Weight w = 0;
  Timestamp t = 0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Latest-snapshot store: four flat tables (vertex hash, vertex, edge hash,
/// edge) holding every edge whose accumulated weight is positive.
///
/// Each edge cell is threaded onto the outgoing Doll of its source and the
/// incoming Doll of its destination. Dolls are kept in chronological order:
/// an updated edge is unlinked and re-appended at both tails.
///
/// Single writer. Const member functions never modify the store.
template <GraphHasher H = HashFn>
class BasicSnapshotStore {
 public:
  using hasher_type = H;

  BasicSnapshotStore(std::size_t vertex_capacity, std::size_t edge_capacity,
                     H hash = H{}, StoreOptions options = {})
      : hash_(std::move(hash)),
        options_(options),
        vertices_(checked(vertex_capacity, "vertex")),
        edge_buckets_(checked(edge_capacity, "edge"), kNil),
        edges_(edge_capacity) {}

  EdgeOutcome process_edge(const StreamEdge& e) {
    if (last_t_ && e.t < *last_t_) throw OrderError(e.t, *last_t_);

    const Index u = find_vertex(e.key.src);
    const Index v = find_vertex(e.key.dst);
    const Index found = (u != kNil && v != kNil)
                            ? find_edge_in(edge_bucket(e.key.src, e.key.dst), u, v)
                            : kNil;

    EdgeOutcome outcome;
    if (found != kNil) {
      outcome = update_edge(found, e);
    } else if (e.w <= 0) {
      outcome = EdgeOutcome::Discarded;
    } else {
      insert_edge(e, u, v);
      outcome = EdgeOutcome::Inserted;
    }
    last_t_ = e.t;
    return outcome;
  }

  std::optional<EdgeInfo> edge_query(std::string_view src,
                                     std::string_view dst) const {
    const Index e = find_edge(src, dst);
    if (e == kNil) return std::nullopt;
    return EdgeInfo{edges_[e].w, edges_[e].t};
  }
  std::optional<EdgeInfo> edge_query(const EdgeKey& k) const {
    return edge_query(k.src, k.dst);
  }

  std::optional<VertexInfo> vertex_query(std::string_view id) const {
    const Index i = find_vertex(id);
    if (i == kNil) return std::nullopt;
    const VertexCell& c = vertices_[i];
    return VertexInfo{c.w_out, c.w_in, c.d_out, c.d_in};
  }

  std::vector<Neighbor> successors(std::string_view u) const {
    return neighbors<Dir::Out>(u, std::nullopt);
  }

  std::vector<Neighbor> precursors(std::string_view v) const {
    return neighbors<Dir::In>(v, std::nullopt);
  }

  /// Prefix of successors(u) with t < t_max. Stops at the first later edge.
  std::vector<Neighbor> successors_before(std::string_view u,
                                          Timestamp t_max) const {
    return neighbors<Dir::Out>(u, t_max);
  }

  // Index-level access, used by the analytics, the audit and the dumps.

  Index find_vertex(std::string_view id) const {
    return vertices_.find(vertex_bucket(id), id);
  }

  Index find_edge(std::string_view src, std::string_view dst) const {
    const Index u = find_vertex(src);
    if (u == kNil) return kNil;
    const Index v = find_vertex(dst);
    if (v == kNil) return kNil;
    return find_edge_in(edge_bucket(src, dst), u, v);
  }

  /// Edge between two live vertex slots, or kNil.
  Index find_edge(Index u, Index v) const {
    return find_edge_in(edge_bucket(vertices_[u].id, vertices_[v].id), u, v);
  }

  /// Calls f(edge_index) along u's outgoing (Dir::Out) or incoming Doll.
  template <Dir D, class F>
  void for_each_edge(Index vertex, F&& f) const {
    doll_for_each<D>(edges_, vertices_[vertex], f);
  }

  std::size_t vertex_bucket(std::string_view id) const {
    return hash_.vertex(id, vertices_.capacity());
  }
  std::size_t edge_bucket(std::string_view src, std::string_view dst) const {
    return hash_.edge(src, dst, edges_.size());
  }

  const H& hasher() const noexcept { return hash_; }
  const StoreOptions& options() const noexcept { return options_; }
  const VertexTable& vertices() const noexcept { return vertices_; }
  const std::vector<Index>& edge_buckets() const noexcept { return edge_buckets_; }
  const std::vector<EdgeCell>& edges() const noexcept { return edges_; }
  const std::vector<Index>& edge_free_list() const noexcept { return edge_free_; }
  Index edge_cursor() const noexcept { return edge_cursor_; }
  std::size_t vertex_capacity() const noexcept { return vertices_.capacity(); }
  std::size_t edge_capacity() const noexcept { return edges_.size(); }
  std::size_t live_vertices() const noexcept { return vertices_.live_count(); }
  std::size_t live_edges() const noexcept { return live_edges_; }
  std::optional<Timestamp> last_time() const noexcept { return last_t_; }

 private:
  static std::size_t checked(std::size_t cap, const char* what) {
    if (cap == 0)
      throw ConfigError(std::string(what) + " capacity must be positive");
    return cap;
  }

  Index find_edge_in(std::size_t bucket, Index u, Index v) const {
    for (Index i = edge_buckets_[bucket]; i != kNil; i = edges_[i].hash_next)
      if (edges_[i].src == u && edges_[i].dst == v) return i;
    return kNil;
  }

  EdgeOutcome update_edge(Index e, const StreamEdge& ev) {
    EdgeCell& c = edges_[e];
    VertexCell& su = vertices_[c.src];
    VertexCell& sv = vertices_[c.dst];
    const Weight before = c.w;
    c.w += ev.w;
    c.t = ev.t;
    doll_unlink<Dir::Out>(edges_, su, e);
    doll_unlink<Dir::In>(edges_, sv, e);
    if (c.w > 0) {
      doll_append<Dir::Out>(edges_, su, e);
      doll_append<Dir::In>(edges_, sv, e);
      su.w_out += ev.w;
      sv.w_in += ev.w;
      return EdgeOutcome::Updated;
    }
    su.w_out -= before;
    sv.w_in -= before;
    --su.d_out;
    --sv.d_in;
    erase_edge(e);
    return EdgeOutcome::Deleted;
  }

  // Cell already off both Dolls; aggregates already adjusted.
  void erase_edge(Index e) {
    const Index u = edges_[e].src;
    const Index v = edges_[e].dst;
    Index* link = &edge_buckets_[edge_bucket(vertices_[u].id, vertices_[v].id)];
    while (*link != e) link = &edges_[*link].hash_next;
    *link = edges_[e].hash_next;
    edges_[e] = EdgeCell{};
    edge_free_.push_back(e);
    --live_edges_;
    if (vertices_[u].isolated())
      vertices_.erase(vertex_bucket(vertices_[u].id), u);
    if (v != u && vertices_[v].isolated())
      vertices_.erase(vertex_bucket(vertices_[v].id), v);
  }

  void insert_edge(const StreamEdge& ev, Index u, Index v) {
    const std::size_t new_vertices =
        (u == kNil) + (v == kNil && ev.key.dst != ev.key.src);
    reserve(new_vertices);

    if (u == kNil) u = vertices_.insert(vertex_bucket(ev.key.src), ev.key.src);
    if (v == kNil) {
      v = ev.key.dst == ev.key.src
              ? u
              : vertices_.insert(vertex_bucket(ev.key.dst), ev.key.dst);
    }

    Index e;
    if (!edge_free_.empty()) {
      e = edge_free_.back();
      edge_free_.pop_back();
    } else {
      e = edge_cursor_++;
    }
    EdgeCell& c = edges_[e];
    c = EdgeCell{};
    c.src = u;
    c.dst = v;
    c.w = ev.w;
    c.t = ev.t;
    append_to_chain(edge_bucket(ev.key.src, ev.key.dst), e);

    VertexCell& su = vertices_[u];
    doll_append<Dir::Out>(edges_, su, e);
    su.w_out += ev.w;
    ++su.d_out;
    VertexCell& sv = vertices_[v];
    doll_append<Dir::In>(edges_, sv, e);
    sv.w_in += ev.w;
    ++sv.d_in;
    ++live_edges_;
  }

  void append_to_chain(std::size_t bucket, Index e) {
    Index* link = &edge_buckets_[bucket];
    while (*link != kNil) link = &edges_[*link].hash_next;
    *link = e;
  }

  // Makes room for one edge and `new_vertices` vertices, or throws before
  // anything is modified.
  void reserve(std::size_t new_vertices) {
    const bool edge_full = edge_free_.empty() && edge_cursor_ == edges_.size();
    const bool vertex_full = vertices_.free_slots() < new_vertices;
    if (!edge_full && !vertex_full) return;
    if (!options_.allow_growth)
      throw CapacityError(edge_full ? "edge table full" : "vertex table full");
    while (vertices_.free_slots() < new_vertices)
      vertices_.grow([this](std::string_view id, std::size_t cap) {
        return hash_.vertex(id, cap);
      });
    if (edge_full) grow_edges();
  }

  void grow_edges() {
    const std::size_t cap = edges_.size() * 2;
    edges_.resize(cap);
    edge_buckets_.assign(cap, kNil);
    for (Index i = 0; i < edge_cursor_; ++i) {
      EdgeCell& c = edges_[i];
      if (!c.occupied()) continue;
      c.hash_next = kNil;
      append_to_chain(edge_bucket(vertices_[c.src].id, vertices_[c.dst].id), i);
    }
  }

  template <Dir D>
  std::vector<Neighbor> neighbors(std::string_view id,
                                  std::optional<Timestamp> t_max) const {
    std::vector<Neighbor> out;
    const Index i = find_vertex(id);
    if (i == kNil) return out;
    using S = DollSide<D>;
    for (Index e = S::head(vertices_[i]); e != kNil; e = S::next(edges_[e])) {
      const EdgeCell& c = edges_[e];
      if (t_max && c.t >= *t_max) break;
      out.push_back({vertices_[S::other(c)].id, c.w, c.t});
    }
    return out;
  }

  H hash_;
  StoreOptions options_;
  VertexTable vertices_;
  std::vector<Index> edge_buckets_;
  std::vector<EdgeCell> edges_;
  std::vector<Index> edge_free_;
  Index edge_cursor_ = 0;
  std::size_t live_edges_ = 0;
  std::optional<Timestamp> last_t_;
};

using SnapshotStore = BasicSnapshotStore<HashFn>;

}  // namespace dolha
