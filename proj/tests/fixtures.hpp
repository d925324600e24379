#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dolha.hpp"

namespace dolha::test {

inline std::string source_path(const std::string& rel) {
  return std::string(DOLHA_SOURCE_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string golden(const std::string& name) {
  return slurp(source_path("tests/golden/" + name));
}

inline StreamEdge ev(const char* u, const char* v, Timestamp t, Weight w) {
  return {{u, v}, t, w};
}

// The ten events of the running example.
inline std::vector<StreamEdge> running_example() {
  return {ev("v1", "v2", 1, 1), ev("v2", "v3", 2, 1), ev("v1", "v4", 3, 1),
          ev("v3", "v4", 4, 1), ev("v2", "v5", 5, 1), ev("v3", "v5", 6, 1),
          ev("v1", "v2", 7, 1), ev("v1", "v4", 8, -1), ev("v1", "v2", 9, -2),
          ev("v1", "v2", 10, 1)};
}

inline TableHasher vertex_assignments() {
  TableHasher h;
  h.assign_vertex("v1", 1).assign_vertex("v2", 2).assign_vertex("v3", 0);
  h.assign_vertex("v4", 1).assign_vertex("v5", 3);
  return h;
}

// Six-cell edge hash of the snapshot example.
inline TableHasher example_hash() {
  TableHasher h = vertex_assignments();
  h.assign_edge("v1", "v2", 1).assign_edge("v2", "v3", 0);
  h.assign_edge("v1", "v4", 4).assign_edge("v3", "v4", 2);
  h.assign_edge("v2", "v5", 4).assign_edge("v3", "v5", 3);
  return h;
}

// Ten-cell edge hash of the windowed example.
inline TableHasher example_hash10() {
  TableHasher h = vertex_assignments();
  h.assign_edge("v1", "v2", 8).assign_edge("v2", "v3", 0);
  h.assign_edge("v1", "v4", 7).assign_edge("v3", "v4", 2);
  h.assign_edge("v2", "v5", 5).assign_edge("v3", "v5", 4);
  return h;
}

inline WindowConfig example_window() { return {7, 3, 0}; }

}  // namespace dolha::test
