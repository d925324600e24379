#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "dolha/persistent_store.hpp"
#include "dolha/snapshot_store.hpp"

namespace dolha {

// Plain-text table dumps used for fixture comparison: one line
// per slot, `/` for an absent link or an empty slot.
//
//   edge_table capacity=6 phi=5
//   2 w=1 t=3 V=0,3 O=0,/ I=/,3 H=4

namespace detail {

struct Link {
  Index i;
};

inline std::ostream& operator<<(std::ostream& os, Link l) {
  if (l.i == kNil) return os << '/';
  return os << l.i;
}

inline void dump_vertex_tables(const VertexTable& vt, std::ostream& os) {
  os << "vertex_hash capacity=" << vt.capacity() << '\n';
  for (std::size_t b = 0; b < vt.buckets().size(); ++b)
    os << b << ' ' << Link{vt.buckets()[b]} << '\n';
  os << "vertex_table capacity=" << vt.capacity() << " phi=" << vt.cursor()
     << '\n';
  for (std::size_t i = 0; i < vt.capacity(); ++i) {
    const VertexCell& c = vt[static_cast<Index>(i)];
    os << i << ' ';
    if (!c.live) {
      os << "id=/ w=/,/ O=/,/ I=/,/ H=/\n";
      continue;
    }
    os << "id=" << c.id << " w=" << c.w_out << ',' << c.w_in
       << " O=" << Link{c.out_head} << ',' << Link{c.out_tail}
       << " I=" << Link{c.in_head} << ',' << Link{c.in_tail}
       << " H=" << Link{c.hash_next} << '\n';
  }
}

inline void dump_edge_hash(const std::vector<Index>& buckets, std::ostream& os) {
  os << "edge_hash capacity=" << buckets.size() << '\n';
  for (std::size_t b = 0; b < buckets.size(); ++b)
    os << b << ' ' << Link{buckets[b]} << '\n';
}

inline void dump_edge_row(const EdgeCell& c, std::ostream& os) {
  os << "w=" << c.w << " t=" << c.t << " V=" << c.src << ',' << c.dst
     << " O=" << Link{c.out_prev} << ',' << Link{c.out_next}
     << " I=" << Link{c.in_prev} << ',' << Link{c.in_next}
     << " H=" << Link{c.hash_next};
}

}  // namespace detail

template <class H>
void dump_tables(const BasicSnapshotStore<H>& s, std::ostream& os) {
  detail::dump_vertex_tables(s.vertices(), os);
  detail::dump_edge_hash(s.edge_buckets(), os);
  os << "edge_table capacity=" << s.edge_capacity()
     << " phi=" << s.edge_cursor() << '\n';
  for (std::size_t i = 0; i < s.edge_capacity(); ++i) {
    const EdgeCell& c = s.edges()[i];
    os << i << ' ';
    if (c.occupied())
      detail::dump_edge_row(c, os);
    else
      os << "w=/ t=/ V=/,/ O=/,/ I=/,/ H=/";
    os << '\n';
  }
}

template <class H>
void dump_tables(const BasicPersistentStore<H>& s, std::ostream& os) {
  detail::dump_vertex_tables(s.vertices(), os);
  detail::dump_edge_hash(s.edge_buckets(), os);
  os << "edge_table capacity=" << s.edge_capacity() << " head=" << s.head()
     << " phi=" << s.tail() << '\n';
  for (std::size_t i = 0; i < s.edge_capacity(); ++i) {
    const PersistentEdgeCell& c = s.edges()[i];
    os << i << ' ';
    if (c.occupied()) {
      detail::dump_edge_row(c, os);
      os << " T=" << detail::Link{c.time_prev};
    } else {
      os << "w=/ t=/ V=/,/ O=/,/ I=/,/ H=/ T=/";
    }
    os << '\n';
  }
}

template <class Store>
std::string dump_string(const Store& s) {
  std::ostringstream os;
  dump_tables(s, os);
  return os.str();
}

}  // namespace dolha
