#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ranges>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dolha/doll.hpp"
#include "dolha/hash.hpp"
#include "dolha/snapshot_store.hpp"
#include "dolha/types.hpp"
#include "dolha/vertex_table.hpp"

namespace dolha {

/// Sliding window: window i covers (t0 + i*slide, t0 + i*slide + length].
/// Window 0 also accepts anything at or before t0.
struct WindowConfig {
  Timestamp length = 0;
  Timestamp slide = 0;
  Timestamp t0 = 0;

  void validate() const {
    if (slide == 0) throw ConfigError("window slide must be positive");
    if (slide >= length)
      throw ConfigError("window slide must be shorter than the window");
  }

  Timestamp start(std::uint64_t ordinal) const { return t0 + ordinal * slide; }
  Timestamp end(std::uint64_t ordinal) const { return start(ordinal) + length; }
};

/// Edge cell of the persistent store: one per stored occurrence.
struct PersistentEdgeCell : EdgeCell {
  /// Previous stored occurrence of the same key (time travel list).
  Index time_prev = kNil;
  /// Inside the ring's [head, tail) range but deleted. Keeps its t.
  bool tombstone = false;
};

/// One stored occurrence: its time and the cumulative in-window weight of
/// the key at that time.
struct Occurrence {
  Timestamp t = 0;
  Weight w = 0;
  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

struct ExpiryReport {
  std::size_t slides = 0;
  /// Occurrences whose timestamp fell out of the window.
  std::size_t expired_occurrences = 0;
  /// Unexpired occurrences dropped because their key had no positive
  /// cumulative weight left.
  std::size_t purged_occurrences = 0;
  std::size_t deleted_keys = 0;
  std::size_t deleted_vertices = 0;

  ExpiryReport& operator+=(const ExpiryReport& o) {
    slides += o.slides;
    expired_occurrences += o.expired_occurrences;
    purged_occurrences += o.purged_occurrences;
    deleted_keys += o.deleted_keys;
    deleted_vertices += o.deleted_vertices;
    return *this;
  }
  friend bool operator==(const ExpiryReport&, const ExpiryReport&) = default;
};

struct IngestResult {
  EdgeOutcome outcome;
  ExpiryReport expiry;
};

/// Persistent (windowed) store. Every stored occurrence gets its own cell in
/// a chronological circular edge table; occurrences of one key are chained
/// newest to oldest by the time travel list, and only the newest one sits on
/// the edge hash collision list. Superseded occurrences stay on the Dolls.
///
/// Sliding the window expires the oldest occurrences, which always form a
/// prefix of the ring, so their slots are recycled by advancing the head.
/// Occurrences deleted further in become tombstones until the head passes.
template <GraphHasher H = HashFn>
class BasicPersistentStore {
 public:
  using hasher_type = H;
  using Cell = PersistentEdgeCell;

  BasicPersistentStore(std::size_t vertex_capacity, std::size_t edge_capacity,
                       H hash = H{}, std::optional<WindowConfig> window = {},
                       StoreOptions options = {})
      : hash_(std::move(hash)),
        options_(options),
        window_(window),
        vertices_(checked(vertex_capacity, "vertex")),
        edge_buckets_(checked(edge_capacity, "edge"), kNil),
        ring_(edge_capacity) {
    if (window_) window_->validate();
  }

  EdgeOutcome process_edge(const StreamEdge& e) {
    if (last_t_ && e.t < *last_t_) throw OrderError(e.t, *last_t_);
    if (window_ && e.t > window_end())
      throw UsageError("event at t=" + std::to_string(e.t) +
                       " is past the current window end " +
                       std::to_string(window_end()) + "; slide first");

    Index u = find_vertex(e.key.src);
    Index v = find_vertex(e.key.dst);
    const bool known = u != kNil && v != kNil &&
                       find_latest_in(edge_bucket(e.key.src, e.key.dst), u, v) != kNil;

    EdgeOutcome outcome;
    if (!known && e.w <= 0) {
      outcome = EdgeOutcome::Discarded;
    } else {
      reserve(known ? 0 : (u == kNil) + (v == kNil && e.key.dst != e.key.src));
      if (u == kNil) u = vertices_.insert(vertex_bucket(e.key.src), e.key.src);
      if (v == kNil)
        v = e.key.dst == e.key.src
                ? u
                : vertices_.insert(vertex_bucket(e.key.dst), e.key.dst);
      const std::size_t bucket = edge_bucket(e.key.src, e.key.dst);
      const Index prev = known ? find_latest_in(bucket, u, v) : kNil;

      const Index slot = ring_push();
      Cell& c = ring_[slot];
      c.src = u;
      c.dst = v;
      c.t = e.t;
      c.w = e.w;
      if (prev != kNil) {
        c.w += ring_[prev].w;
        c.time_prev = prev;
        replace_in_chain(bucket, prev, slot);
        outcome = EdgeOutcome::Appended;
      } else {
        append_to_chain(bucket, slot);
        ++vertices_[u].d_out;
        ++vertices_[v].d_in;
        ++live_keys_;
        outcome = EdgeOutcome::Inserted;
      }
      doll_append<Dir::Out>(ring_, vertices_[u], slot);
      doll_append<Dir::In>(ring_, vertices_[v], slot);
      vertices_[u].w_out += e.w;
      vertices_[v].w_in += e.w;
      ++live_occurrences_;
      peak_occupancy_ = std::max(peak_occupancy_, size_);
    }
    last_t_ = e.t;
    return outcome;
  }

  /// Moves to the next window and expires everything at or before its start.
  ExpiryReport slide_window() {
    if (!window_) throw UsageError("slide_window: no window configured");
    ExpiryReport report;
    report.slides = 1;
    ++ordinal_;
    const std::size_t expired = upper_position(window_start());
    for (std::size_t k = 0; k < expired; ++k) {
      const Index slot = physical(k);
      if (!ring_[slot].tombstone) expire(slot, report);
    }
    reclaim_head();
    return report;
  }

  /// Slides until `t` falls inside the current window. No-op without a window.
  ExpiryReport advance_clock(Timestamp t) {
    ExpiryReport report;
    if (!window_) return report;
    while (t > window_end()) report += slide_window();
    return report;
  }

  IngestResult ingest(const StreamEdge& e) {
    if (last_t_ && e.t < *last_t_) throw OrderError(e.t, *last_t_);
    IngestResult r{EdgeOutcome::Discarded, advance_clock(e.t)};
    r.outcome = process_edge(e);
    return r;
  }

  // Queries.

  std::optional<Occurrence> edge_latest(std::string_view src,
                                        std::string_view dst) const {
    const Index e = find_latest(src, dst);
    if (e == kNil) return std::nullopt;
    return Occurrence{ring_[e].t, ring_[e].w};
  }

  /// Every stored occurrence of the key, oldest first.
  std::vector<Occurrence> edge_history(std::string_view src,
                                       std::string_view dst) const {
    std::vector<Occurrence> out;
    for (Index e = find_latest(src, dst); e != kNil; e = ring_[e].time_prev)
      out.push_back({ring_[e].t, ring_[e].w});
    std::ranges::reverse(out);
    return out;
  }

  std::optional<VertexInfo> vertex_query(std::string_view id) const {
    const Index i = find_vertex(id);
    if (i == kNil) return std::nullopt;
    const VertexCell& c = vertices_[i];
    return VertexInfo{c.w_out, c.w_in, c.d_out, c.d_in};
  }

  /// One row per distinct successor: its latest occurrence, ordered by the
  /// time of that occurrence.
  std::vector<Neighbor> successors_latest(std::string_view u) const {
    return latest_neighbors<Dir::Out>(u);
  }
  std::vector<Neighbor> precursors_latest(std::string_view v) const {
    return latest_neighbors<Dir::In>(v);
  }

  /// Every stored outgoing occurrence, chronological, duplicates included.
  std::vector<Neighbor> successors_history(std::string_view u) const {
    return history_neighbors<Dir::Out>(u);
  }
  std::vector<Neighbor> precursors_history(std::string_view v) const {
    return history_neighbors<Dir::In>(v);
  }

  // Index-level access.

  Index find_vertex(std::string_view id) const {
    return vertices_.find(vertex_bucket(id), id);
  }

  /// Newest stored occurrence of src -> dst, or kNil.
  Index find_latest(std::string_view src, std::string_view dst) const {
    const Index u = find_vertex(src);
    if (u == kNil) return kNil;
    const Index v = find_vertex(dst);
    if (v == kNil) return kNil;
    return find_latest_in(edge_bucket(src, dst), u, v);
  }

  template <Dir D, class F>
  void for_each_edge(Index vertex, F&& f) const {
    doll_for_each<D>(ring_, vertices_[vertex], f);
  }

  /// Ring slot of logical position k (0 = head).
  Index physical(std::size_t k) const {
    return static_cast<Index>((head_ + k) % ring_.size());
  }
  /// Logical position of the first slot with t >= `t` (tombstones included).
  std::size_t lower_position(Timestamp t) const {
    return partition([&](std::size_t k) { return ring_[physical(k)].t < t; });
  }
  /// Logical position of the first slot with t > `t`.
  std::size_t upper_position(Timestamp t) const {
    return partition([&](std::size_t k) { return ring_[physical(k)].t <= t; });
  }

  std::size_t vertex_bucket(std::string_view id) const {
    return hash_.vertex(id, vertices_.capacity());
  }
  std::size_t edge_bucket(std::string_view src, std::string_view dst) const {
    return hash_.edge(src, dst, ring_.size());
  }

  const H& hasher() const noexcept { return hash_; }
  const StoreOptions& options() const noexcept { return options_; }
  const std::optional<WindowConfig>& window() const noexcept { return window_; }
  std::uint64_t window_ordinal() const noexcept { return ordinal_; }
  Timestamp window_start() const { return window_->start(ordinal_); }
  Timestamp window_end() const { return window_->end(ordinal_); }

  const VertexTable& vertices() const noexcept { return vertices_; }
  const std::vector<Index>& edge_buckets() const noexcept { return edge_buckets_; }
  const std::vector<Cell>& edges() const noexcept { return ring_; }
  Index head() const noexcept { return head_; }
  /// Next slot to be written (phi_E).
  Index tail() const { return physical(size_); }
  /// Occupied ring slots, tombstones included.
  std::size_t ring_size() const noexcept { return size_; }
  std::size_t peak_occupancy() const noexcept { return peak_occupancy_; }
  std::size_t vertex_capacity() const noexcept { return vertices_.capacity(); }
  std::size_t edge_capacity() const noexcept { return ring_.size(); }
  std::size_t live_vertices() const noexcept { return vertices_.live_count(); }
  std::size_t live_occurrences() const noexcept { return live_occurrences_; }
  std::size_t live_keys() const noexcept { return live_keys_; }
  std::optional<Timestamp> last_time() const noexcept { return last_t_; }

 private:
  static std::size_t checked(std::size_t cap, const char* what) {
    if (cap == 0)
      throw ConfigError(std::string(what) + " capacity must be positive");
    return cap;
  }

  template <class Pred>
  std::size_t partition(Pred&& pred) const {
    auto positions = std::views::iota(std::size_t{0}, size_);
    auto it = std::ranges::partition_point(positions, pred);
    return it == positions.end() ? size_ : *it;
  }

  Index find_latest_in(std::size_t bucket, Index u, Index v) const {
    for (Index i = edge_buckets_[bucket]; i != kNil; i = ring_[i].hash_next)
      if (ring_[i].src == u && ring_[i].dst == v) return i;
    return kNil;
  }

  void append_to_chain(std::size_t bucket, Index e) {
    Index* link = &edge_buckets_[bucket];
    while (*link != kNil) link = &ring_[*link].hash_next;
    *link = e;
  }

  void replace_in_chain(std::size_t bucket, Index old_slot, Index new_slot) {
    Index* link = &edge_buckets_[bucket];
    while (*link != old_slot) link = &ring_[*link].hash_next;
    *link = new_slot;
    ring_[new_slot].hash_next = ring_[old_slot].hash_next;
    ring_[old_slot].hash_next = kNil;
  }

  void remove_from_chain(std::size_t bucket, Index slot) {
    Index* link = &edge_buckets_[bucket];
    while (*link != slot) link = &ring_[*link].hash_next;
    *link = ring_[slot].hash_next;
    ring_[slot].hash_next = kNil;
  }

  Index ring_push() {
    const Index slot = physical(size_);
    ring_[slot] = Cell{};
    ++size_;
    return slot;
  }

  void reserve(std::size_t new_vertices) {
    const bool ring_full = size_ == ring_.size();
    const bool vertex_full = vertices_.free_slots() < new_vertices;
    if (!ring_full && !vertex_full) return;
    if (!options_.allow_growth)
      throw CapacityError(ring_full ? "edge table full" : "vertex table full");
    while (vertices_.free_slots() < new_vertices)
      vertices_.grow([this](std::string_view id, std::size_t cap) {
        return hash_.vertex(id, cap);
      });
    if (ring_full) grow_ring();
  }

  // Doubles the ring, unrolling it so the head lands at slot 0, and rebuilds
  // the edge hash over the newest occurrence of every key.
  void grow_ring() {
    const std::size_t cap = ring_.size();
    const Index head = head_;
    auto remap = [cap, head](Index i) {
      return static_cast<Index>((i + cap - head) % cap);
    };
    std::vector<Cell> fresh(cap * 2);
    for (std::size_t k = 0; k < size_; ++k) {
      Cell c = ring_[physical(k)];
      for (Index* p : {&c.out_prev, &c.out_next, &c.in_prev, &c.in_next,
                       &c.time_prev})
        if (*p != kNil) *p = remap(*p);
      c.hash_next = kNil;
      fresh[k] = c;
    }
    vertices_.remap_edge_links(remap);
    ring_ = std::move(fresh);
    head_ = 0;

    edge_buckets_.assign(ring_.size(), kNil);
    std::vector<bool> superseded(size_, false);
    for (std::size_t k = 0; k < size_; ++k)
      if (ring_[k].occupied() && ring_[k].time_prev != kNil)
        superseded[ring_[k].time_prev] = true;
    for (std::size_t k = 0; k < size_; ++k) {
      if (!ring_[k].occupied() || superseded[k]) continue;
      const Cell& c = ring_[k];
      append_to_chain(edge_bucket(vertices_[c.src].id, vertices_[c.dst].id),
                      static_cast<Index>(k));
    }
  }

  // Expires the oldest stored occurrence of its key.
  void expire(Index e, ExpiryReport& report) {
    const Index u = ring_[e].src;
    const Index v = ring_[e].dst;
    const std::size_t bucket = edge_bucket(vertices_[u].id, vertices_[v].id);
    const Index latest = find_latest_in(bucket, u, v);

    newer_.clear();
    for (Index i = latest; i != e; i = ring_[i].time_prev) newer_.push_back(i);

    const Weight delta = ring_[e].w;
    for (Index n : newer_) ring_[n].w -= delta;
    vertices_[u].w_out -= delta;
    vertices_[v].w_in -= delta;

    bool key_gone = newer_.empty();
    if (!newer_.empty()) {
      ring_[newer_.back()].time_prev = kNil;
      if (std::ranges::all_of(newer_, [&](Index n) { return ring_[n].w <= 0; })) {
        const Weight rest = ring_[latest].w;
        vertices_[u].w_out -= rest;
        vertices_[v].w_in -= rest;
        remove_from_chain(bucket, latest);
        for (Index n : newer_) kill(n);
        report.purged_occurrences += newer_.size();
        key_gone = true;
      }
    } else {
      remove_from_chain(bucket, e);
    }
    if (key_gone) {
      --vertices_[u].d_out;
      --vertices_[v].d_in;
      --live_keys_;
      ++report.deleted_keys;
    }
    kill(e);
    ++report.expired_occurrences;

    if (vertices_[u].isolated()) {
      vertices_.erase(vertex_bucket(vertices_[u].id), u);
      ++report.deleted_vertices;
    }
    if (v != u && vertices_[v].isolated()) {
      vertices_.erase(vertex_bucket(vertices_[v].id), v);
      ++report.deleted_vertices;
    }
  }

  // Unlinks an occurrence from both Dolls and leaves a tombstone.
  void kill(Index e) {
    Cell& c = ring_[e];
    doll_unlink<Dir::Out>(ring_, vertices_[c.src], e);
    doll_unlink<Dir::In>(ring_, vertices_[c.dst], e);
    const Timestamp t = c.t;
    c = Cell{};
    c.t = t;
    c.tombstone = true;
    --live_occurrences_;
  }

  void reclaim_head() {
    while (size_ > 0 && ring_[head_].tombstone) {
      ring_[head_] = Cell{};
      head_ = physical(1);
      --size_;
    }
  }

  template <Dir D>
  std::vector<Neighbor> latest_neighbors(std::string_view id) const {
    std::vector<Neighbor> out;
    const Index i = find_vertex(id);
    if (i == kNil) return out;
    using S = DollSide<D>;
    std::unordered_set<Index> superseded;
    for (Index e = S::tail(vertices_[i]); e != kNil; e = S::prev(ring_[e])) {
      if (superseded.contains(e)) continue;
      const Cell& c = ring_[e];
      out.push_back({vertices_[S::other(c)].id, c.w, c.t});
      for (Index p = c.time_prev; p != kNil; p = ring_[p].time_prev)
        superseded.insert(p);
    }
    std::ranges::reverse(out);
    return out;
  }

  template <Dir D>
  std::vector<Neighbor> history_neighbors(std::string_view id) const {
    std::vector<Neighbor> out;
    const Index i = find_vertex(id);
    if (i == kNil) return out;
    using S = DollSide<D>;
    for (Index e = S::head(vertices_[i]); e != kNil; e = S::next(ring_[e]))
      out.push_back({vertices_[S::other(ring_[e])].id, ring_[e].w, ring_[e].t});
    return out;
  }

  H hash_;
  StoreOptions options_;
  std::optional<WindowConfig> window_;
  std::uint64_t ordinal_ = 0;
  VertexTable vertices_;
  std::vector<Index> edge_buckets_;
  std::vector<Cell> ring_;
  Index head_ = 0;
  std::size_t size_ = 0;
  std::size_t peak_occupancy_ = 0;
  std::size_t live_occurrences_ = 0;
  std::size_t live_keys_ = 0;
  std::optional<Timestamp> last_t_;
  std::vector<Index> newer_;  // scratch for expire()
};

using PersistentStore = BasicPersistentStore<HashFn>;

}  // namespace dolha
