#pragma once

#include <vector>

#include "dolha/types.hpp"
#include "dolha/vertex_table.hpp"

namespace dolha {

/// One edge table slot of the snapshot store. `src == kNil` marks an empty slot.
struct EdgeCell {
  Index src = kNil;
  Index dst = kNil;
  Weight w = 0;
  Timestamp t = 0;
  Index out_prev = kNil;
  Index out_next = kNil;
  Index in_prev = kNil;
  Index in_next = kNil;
  Index hash_next = kNil;

  bool occupied() const noexcept { return src != kNil; }
};

// Double orthogonal linked lists. Every edge cell sits on the outgoing list of
// its source vertex and the incoming list of its destination vertex; both
// lists are doubly linked through the edge table and anchored in the vertex
// table by head/tail indices.

enum class Dir { Out, In };

template <Dir D>
struct DollSide;

template <>
struct DollSide<Dir::Out> {
  template <class C> static Index& prev(C& c) { return c.out_prev; }
  template <class C> static Index& next(C& c) { return c.out_next; }
  template <class C> static Index prev(const C& c) { return c.out_prev; }
  template <class C> static Index next(const C& c) { return c.out_next; }
  template <class C> static Index owner(const C& c) { return c.src; }
  template <class C> static Index other(const C& c) { return c.dst; }
  static Index& head(VertexCell& v) { return v.out_head; }
  static Index& tail(VertexCell& v) { return v.out_tail; }
  static Index head(const VertexCell& v) { return v.out_head; }
  static Index tail(const VertexCell& v) { return v.out_tail; }
};

template <>
struct DollSide<Dir::In> {
  template <class C> static Index& prev(C& c) { return c.in_prev; }
  template <class C> static Index& next(C& c) { return c.in_next; }
  template <class C> static Index prev(const C& c) { return c.in_prev; }
  template <class C> static Index next(const C& c) { return c.in_next; }
  template <class C> static Index owner(const C& c) { return c.dst; }
  template <class C> static Index other(const C& c) { return c.src; }
  static Index& head(VertexCell& v) { return v.in_head; }
  static Index& tail(VertexCell& v) { return v.in_tail; }
  static Index head(const VertexCell& v) { return v.in_head; }
  static Index tail(const VertexCell& v) { return v.in_tail; }
};

template <Dir D, class Cell>
void doll_append(std::vector<Cell>& edges, VertexCell& owner, Index e) {
  using S = DollSide<D>;
  Cell& c = edges[e];
  S::next(c) = kNil;
  S::prev(c) = S::tail(owner);
  if (S::tail(owner) == kNil)
    S::head(owner) = e;
  else
    S::next(edges[S::tail(owner)]) = e;
  S::tail(owner) = e;
}

template <Dir D, class Cell>
void doll_unlink(std::vector<Cell>& edges, VertexCell& owner, Index e) {
  using S = DollSide<D>;
  Cell& c = edges[e];
  const Index p = S::prev(c);
  const Index n = S::next(c);
  if (p == kNil)
    S::head(owner) = n;
  else
    S::next(edges[p]) = n;
  if (n == kNil)
    S::tail(owner) = p;
  else
    S::prev(edges[n]) = p;
  S::prev(c) = kNil;
  S::next(c) = kNil;
}

/// Walks one Doll head to tail.
template <Dir D, class Cell, class F>
void doll_for_each(const std::vector<Cell>& edges, const VertexCell& owner,
                   F&& f) {
  using S = DollSide<D>;
  for (Index e = S::head(owner); e != kNil; e = S::next(edges[e])) f(e);
}

}  // namespace dolha
