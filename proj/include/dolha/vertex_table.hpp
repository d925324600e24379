#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "dolha/types.hpp"

namespace dolha {

/// One vertex table slot. `live == false` marks an empty or recycled slot.
struct VertexCell {
  VertexId id;
  Weight w_out = 0;
  Weight w_in = 0;
  std::uint64_t d_out = 0;
  std::uint64_t d_in = 0;
  Index out_head = kNil;
  Index out_tail = kNil;
  Index in_head = kNil;
  Index in_tail = kNil;
  Index hash_next = kNil;
  bool live = false;

  bool isolated() const noexcept { return out_head == kNil && in_head == kNil; }
};

/// Vertex hash table plus vertex table, shared by both stores.
///
/// The hash array holds the first vertex-table index of each collision list;
/// new vertices go to the tail of their list. Slots are handed out from the
/// LIFO free list first, then from the cursor (phi_V).
class VertexTable {
 public:
  explicit VertexTable(std::size_t capacity)
      : buckets_(capacity, kNil), cells_(capacity) {}

  std::size_t capacity() const noexcept { return cells_.size(); }
  std::size_t live_count() const noexcept { return live_; }
  Index cursor() const noexcept { return cursor_; }
  std::size_t free_slots() const noexcept {
    return free_.size() + (cells_.size() - cursor_);
  }

  const std::vector<Index>& buckets() const noexcept { return buckets_; }
  const std::vector<VertexCell>& cells() const noexcept { return cells_; }
  const std::vector<Index>& free_list() const noexcept { return free_; }

  VertexCell& operator[](Index i) { return cells_[i]; }
  const VertexCell& operator[](Index i) const { return cells_[i]; }

  Index find(std::size_t bucket, std::string_view id) const {
    for (Index i = buckets_[bucket]; i != kNil; i = cells_[i].hash_next)
      if (cells_[i].id == id) return i;
    return kNil;
  }

  /// Caller guarantees free_slots() > 0 and that `id` is absent.
  Index insert(std::size_t bucket, std::string_view id) {
    Index slot;
    if (!free_.empty()) {
      slot = free_.back();
      free_.pop_back();
    } else {
      slot = cursor_++;
    }
    VertexCell& c = cells_[slot];
    c = VertexCell{};
    c.id.assign(id);
    c.live = true;
    append_to_chain(bucket, slot);
    ++live_;
    return slot;
  }

  void erase(std::size_t bucket, Index slot) {
    Index* link = &buckets_[bucket];
    while (*link != slot) link = &cells_[*link].hash_next;
    *link = cells_[slot].hash_next;
    cells_[slot] = VertexCell{};
    free_.push_back(slot);
    --live_;
  }

  /// Doubles both arrays. Slot indices are preserved; collision lists are
  /// rebuilt in slot order against the new bucket count.
  template <class BucketOf>
  void grow(BucketOf&& bucket_of) {
    const std::size_t cap = cells_.size() * 2;
    cells_.resize(cap);
    buckets_.assign(cap, kNil);
    for (Index i = 0; i < cursor_; ++i) {
      if (!cells_[i].live) continue;
      cells_[i].hash_next = kNil;
      append_to_chain(bucket_of(std::string_view(cells_[i].id), cap), i);
    }
  }

  /// Applies `f` to every stored edge-table index (Doll heads and tails).
  template <class F>
  void remap_edge_links(F&& f) {
    for (auto& c : cells_) {
      if (!c.live) continue;
      for (Index* p : {&c.out_head, &c.out_tail, &c.in_head, &c.in_tail})
        if (*p != kNil) *p = f(*p);
    }
  }

 private:
  void append_to_chain(std::size_t bucket, Index slot) {
    Index* link = &buckets_[bucket];
    while (*link != kNil) link = &cells_[*link].hash_next;
    *link = slot;
  }

  std::vector<Index> buckets_;
  std::vector<VertexCell> cells_;
  std::vector<Index> free_;
  Index cursor_ = 0;
  std::size_t live_ = 0;
};

}  // namespace dolha
