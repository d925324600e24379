#pragma once

#include <fmt/format.h>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dolha/persistent_store.hpp"
#include "dolha/snapshot_store.hpp"

namespace dolha {

// Structural self-checks. Each returns human-readable violations; an empty
// vector means the store is consistent. Cost is linear in the table sizes.

namespace detail {

template <class BucketOf>
void audit_vertex_chains(const VertexTable& vt, BucketOf&& bucket_of,
                         std::vector<std::string>& out) {
  std::vector<bool> seen(vt.capacity(), false);
  std::size_t on_chains = 0;
  for (std::size_t b = 0; b < vt.buckets().size(); ++b) {
    for (Index i = vt.buckets()[b]; i != kNil; i = vt[i].hash_next) {
      if (i >= vt.capacity() || seen[i]) {
        out.push_back(fmt::format("vertex bucket {}: bad or cyclic link {}", b, i));
        break;
      }
      seen[i] = true;
      ++on_chains;
      if (!vt[i].live)
        out.push_back(fmt::format("vertex slot {} on a chain but not live", i));
      else if (bucket_of(vt[i].id) != b)
        out.push_back(fmt::format("vertex {} chained in bucket {}", vt[i].id, b));
    }
  }
  std::size_t live = 0;
  for (std::size_t i = 0; i < vt.capacity(); ++i) {
    if (!vt[static_cast<Index>(i)].live) continue;
    ++live;
    if (!seen[i]) out.push_back(fmt::format("live vertex slot {} not chained", i));
    if (i >= vt.cursor())
      out.push_back(fmt::format("live vertex slot {} beyond cursor", i));
  }
  if (live != vt.live_count())
    out.push_back(fmt::format("vertex live count {} != {}", vt.live_count(), live));
  if (on_chains != live)
    out.push_back(fmt::format("{} vertices chained, {} live", on_chains, live));
  for (Index f : vt.free_list())
    if (vt[f].live) out.push_back(fmt::format("free vertex slot {} is live", f));
  if (live + vt.free_list().size() != vt.cursor())
    out.push_back("vertex cursor and free list disagree with the live count");
}

// Walks one Doll; checks link symmetry, ownership and chronology. Returns
// the visited cells, or stops early on a broken link.
template <Dir D, class Cell, class Usable>
std::vector<Index> audit_doll(const std::vector<Cell>& edges, Index owner,
                              const VertexCell& vc, Usable&& usable,
                              std::vector<std::string>& out) {
  using S = DollSide<D>;
  const char* side = D == Dir::Out ? "out" : "in";
  std::vector<Index> cells;
  Index prev = kNil;
  for (Index e = S::head(vc); e != kNil; e = S::next(edges[e])) {
    if (e >= edges.size() || cells.size() > edges.size()) {
      out.push_back(fmt::format("{} Doll of {}: bad or cyclic link", side, vc.id));
      return cells;
    }
    const Cell& c = edges[e];
    if (!usable(c))
      out.push_back(fmt::format("{} Doll of {}: cell {} not in use", side, vc.id, e));
    if (S::owner(c) != owner)
      out.push_back(fmt::format("{} Doll of {}: cell {} has another owner", side,
                                vc.id, e));
    if (S::prev(c) != prev)
      out.push_back(fmt::format("{} Doll of {}: cell {} prev link broken", side,
                                vc.id, e));
    if (prev != kNil && edges[prev].t > c.t)
      out.push_back(fmt::format("{} Doll of {}: cell {} out of time order", side,
                                vc.id, e));
    cells.push_back(e);
    prev = e;
  }
  if (S::tail(vc) != prev)
    out.push_back(fmt::format("{} Doll of {}: tail mismatch", side, vc.id));
  return cells;
}

}  // namespace detail

template <class H>
std::vector<std::string> audit(const BasicSnapshotStore<H>& s) {
  std::vector<std::string> out;
  const VertexTable& vt = s.vertices();
  const auto& edges = s.edges();
  detail::audit_vertex_chains(
      vt, [&](std::string_view id) { return s.vertex_bucket(id); }, out);

  std::vector<int> on_out(edges.size(), 0), on_in(edges.size(), 0);
  auto usable = [](const EdgeCell& c) { return c.occupied(); };
  for (Index i = 0; i < vt.capacity(); ++i) {
    const VertexCell& vc = vt[i];
    if (!vc.live) continue;
    if (vc.isolated()) out.push_back(fmt::format("vertex {} is isolated", vc.id));
    Weight w = 0;
    std::uint64_t d = 0;
    for (Index e : detail::audit_doll<Dir::Out>(edges, i, vc, usable, out)) {
      ++on_out[e];
      w += edges[e].w;
      ++d;
    }
    if (w != vc.w_out || d != vc.d_out)
      out.push_back(fmt::format("vertex {}: out aggregates {}/{} != {}/{}", vc.id,
                                vc.w_out, vc.d_out, w, d));
    w = 0;
    d = 0;
    for (Index e : detail::audit_doll<Dir::In>(edges, i, vc, usable, out)) {
      ++on_in[e];
      w += edges[e].w;
      ++d;
    }
    if (w != vc.w_in || d != vc.d_in)
      out.push_back(fmt::format("vertex {}: in aggregates {}/{} != {}/{}", vc.id,
                                vc.w_in, vc.d_in, w, d));
  }

  std::vector<bool> chained(edges.size(), false);
  std::set<std::pair<Index, Index>> keys;
  std::size_t on_chains = 0;
  for (std::size_t b = 0; b < s.edge_buckets().size(); ++b) {
    for (Index e = s.edge_buckets()[b]; e != kNil; e = edges[e].hash_next) {
      if (e >= edges.size() || chained[e]) {
        out.push_back(fmt::format("edge bucket {}: bad or cyclic link", b));
        break;
      }
      chained[e] = true;
      ++on_chains;
      const EdgeCell& c = edges[e];
      if (!c.occupied()) {
        out.push_back(fmt::format("edge slot {} chained but empty", e));
        continue;
      }
      if (s.edge_bucket(vt[c.src].id, vt[c.dst].id) != b)
        out.push_back(fmt::format("edge slot {} chained in bucket {}", e, b));
      if (!keys.emplace(c.src, c.dst).second)
        out.push_back(fmt::format("edge slot {}: duplicate key", e));
    }
  }

  std::size_t occupied = 0;
  for (Index e = 0; e < edges.size(); ++e) {
    const EdgeCell& c = edges[e];
    if (!c.occupied()) continue;
    ++occupied;
    if (c.w <= 0) out.push_back(fmt::format("edge slot {} has weight {}", e, c.w));
    if (c.src >= vt.capacity() || !vt[c.src].live || c.dst >= vt.capacity() ||
        !vt[c.dst].live) {
      out.push_back(fmt::format("edge slot {} has a dead endpoint", e));
      continue;
    }
    if (on_out[e] != 1 || on_in[e] != 1)
      out.push_back(fmt::format("edge slot {} on {} out and {} in Dolls", e,
                                on_out[e], on_in[e]));
    if (!chained[e]) out.push_back(fmt::format("edge slot {} not chained", e));
    if (e >= s.edge_cursor())
      out.push_back(fmt::format("edge slot {} beyond cursor", e));
  }
  if (occupied != s.live_edges() || on_chains != occupied)
    out.push_back(fmt::format("edge counts: live {} occupied {} chained {}",
                              s.live_edges(), occupied, on_chains));
  for (Index f : s.edge_free_list())
    if (edges[f].occupied()) out.push_back(fmt::format("free edge slot {} in use", f));
  if (occupied + s.edge_free_list().size() != s.edge_cursor())
    out.push_back("edge cursor and free list disagree with the live count");
  return out;
}

template <class H>
std::vector<std::string> audit(const BasicPersistentStore<H>& s) {
  using Cell = PersistentEdgeCell;
  std::vector<std::string> out;
  const VertexTable& vt = s.vertices();
  const auto& ring = s.edges();
  const std::size_t cap = ring.size();
  detail::audit_vertex_chains(
      vt, [&](std::string_view id) { return s.vertex_bucket(id); }, out);

  // Ring: [head, head + size) holds occupied cells and tombstones in time
  // order; everything else is blank.
  std::vector<std::size_t> position(cap, cap);
  for (std::size_t k = 0; k < s.ring_size(); ++k) position[s.physical(k)] = k;
  std::size_t occupied = 0;
  for (Index e = 0; e < cap; ++e) {
    const Cell& c = ring[e];
    if (position[e] == cap) {
      if (c.occupied() || c.tombstone)
        out.push_back(fmt::format("ring slot {} outside [head, tail) in use", e));
      continue;
    }
    if (c.occupied() == c.tombstone)
      out.push_back(fmt::format("ring slot {} neither live nor tombstone", e));
    if (c.occupied()) ++occupied;
  }
  for (std::size_t k = 1; k < s.ring_size(); ++k)
    if (ring[s.physical(k - 1)].t > ring[s.physical(k)].t)
      out.push_back(fmt::format("ring position {} out of time order", k));
  if (occupied != s.live_occurrences())
    out.push_back(fmt::format("live occurrences {} != {}", s.live_occurrences(),
                              occupied));

  // Time travel: every occupied cell lies on exactly one list, headed by the
  // chained (newest) occurrence of its key.
  std::vector<int> pointed(cap, 0);
  for (Index e = 0; e < cap; ++e) {
    const Cell& c = ring[e];
    if (!c.occupied() || c.time_prev == kNil) continue;
    const Index p = c.time_prev;
    if (p >= cap || !ring[p].occupied()) {
      out.push_back(fmt::format("ring slot {}: time link to unused slot", e));
      continue;
    }
    ++pointed[p];
    if (ring[p].src != c.src || ring[p].dst != c.dst)
      out.push_back(fmt::format("ring slot {}: time link crosses keys", e));
    if (position[p] >= position[e])
      out.push_back(fmt::format("ring slot {}: time link goes forward", e));
  }

  std::vector<bool> chained(cap, false);
  std::set<std::pair<Index, Index>> keys;
  std::size_t on_chains = 0;
  for (std::size_t b = 0; b < s.edge_buckets().size(); ++b) {
    for (Index e = s.edge_buckets()[b]; e != kNil; e = ring[e].hash_next) {
      if (e >= cap || chained[e]) {
        out.push_back(fmt::format("edge bucket {}: bad or cyclic link", b));
        break;
      }
      chained[e] = true;
      ++on_chains;
      const Cell& c = ring[e];
      if (!c.occupied()) {
        out.push_back(fmt::format("ring slot {} chained but unused", e));
        continue;
      }
      if (pointed[e] != 0)
        out.push_back(fmt::format("ring slot {} chained but superseded", e));
      if (s.edge_bucket(vt[c.src].id, vt[c.dst].id) != b)
        out.push_back(fmt::format("ring slot {} chained in bucket {}", e, b));
      if (!keys.emplace(c.src, c.dst).second)
        out.push_back(fmt::format("ring slot {}: duplicate key on chains", e));
    }
  }
  for (Index e = 0; e < cap; ++e) {
    const Cell& c = ring[e];
    if (!c.occupied()) continue;
    if (pointed[e] > 1)
      out.push_back(fmt::format("ring slot {} on {} time lists", e, pointed[e]));
    if (pointed[e] == 0 && !chained[e])
      out.push_back(fmt::format("ring slot {} unreachable", e));
  }
  if (on_chains != s.live_keys())
    out.push_back(fmt::format("live keys {} != chained {}", s.live_keys(), on_chains));

  // Dolls and aggregates. The weight of a key is that of its newest occurrence.
  std::vector<int> on_out(cap, 0), on_in(cap, 0);
  auto usable = [](const Cell& c) { return c.occupied(); };
  for (Index i = 0; i < vt.capacity(); ++i) {
    const VertexCell& vc = vt[i];
    if (!vc.live) continue;
    if (vc.isolated()) out.push_back(fmt::format("vertex {} is isolated", vc.id));
    Weight w = 0;
    std::uint64_t d = 0;
    for (Index e : detail::audit_doll<Dir::Out>(ring, i, vc, usable, out)) {
      ++on_out[e];
      if (chained[e]) w += ring[e].w, ++d;
    }
    if (w != vc.w_out || d != vc.d_out)
      out.push_back(fmt::format("vertex {}: out aggregates {}/{} != {}/{}", vc.id,
                                vc.w_out, vc.d_out, w, d));
    w = 0;
    d = 0;
    for (Index e : detail::audit_doll<Dir::In>(ring, i, vc, usable, out)) {
      ++on_in[e];
      if (chained[e]) w += ring[e].w, ++d;
    }
    if (w != vc.w_in || d != vc.d_in)
      out.push_back(fmt::format("vertex {}: in aggregates {}/{} != {}/{}", vc.id,
                                vc.w_in, vc.d_in, w, d));
  }
  for (Index e = 0; e < cap; ++e) {
    if (!ring[e].occupied()) continue;
    if (on_out[e] != 1 || on_in[e] != 1)
      out.push_back(fmt::format("ring slot {} on {} out and {} in Dolls", e,
                                on_out[e], on_in[e]));
  }

  if (s.window()) {
    const Timestamp lo = s.window_start();
    const Timestamp hi = s.window_end();
    for (Index e = 0; e < cap; ++e) {
      const Cell& c = ring[e];
      if (!c.occupied()) continue;
      if (c.t > hi || (s.window_ordinal() > 0 && c.t <= lo))
        out.push_back(fmt::format("ring slot {} at t={} outside window ({}, {}]",
                                  e, c.t, lo, hi));
    }
  }
  return out;
}

}  // namespace dolha
