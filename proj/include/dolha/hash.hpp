#pragma once

#include <concepts>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>

#include "dolha/types.hpp"

namespace dolha {

/// MurmurHash64A by Austin Appleby (public domain), little-endian reads.
inline std::uint64_t murmur64a(const void* key, std::size_t len,
                               std::uint64_t seed) noexcept {
  constexpr std::uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;

  std::uint64_t h = seed ^ (len * m);
  const auto* data = static_cast<const unsigned char*>(key);
  const auto* end = data + (len / 8) * 8;

  for (; data != end; data += 8) {
    std::uint64_t k;
    std::memcpy(&k, data, 8);
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }

  switch (len & 7) {
    case 7: h ^= std::uint64_t(data[6]) << 48; [[fallthrough]];
    case 6: h ^= std::uint64_t(data[5]) << 40; [[fallthrough]];
    case 5: h ^= std::uint64_t(data[4]) << 32; [[fallthrough]];
    case 4: h ^= std::uint64_t(data[3]) << 24; [[fallthrough]];
    case 3: h ^= std::uint64_t(data[2]) << 16; [[fallthrough]];
    case 2: h ^= std::uint64_t(data[1]) << 8; [[fallthrough]];
    case 1:
      h ^= std::uint64_t(data[0]);
      h *= m;
  }

  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

/// Byte string hashed for edge u -> v: u, one 0x00 separator, v.
/// Keeps ("ab","c") and ("a","bc") apart.
inline void edge_bytes(std::string& out, std::string_view src,
                       std::string_view dst) {
  out.clear();
  out.reserve(src.size() + dst.size() + 1);
  out.append(src);
  out.push_back('\0');
  out.append(dst);
}

/// What the stores need from a hash policy: a vertex bucket and an edge
/// bucket, both strictly below `capacity`.
template <class H>
concept GraphHasher = requires(const H& h, std::string_view a,
                               std::string_view b, std::size_t cap) {
  { h.vertex(a, cap) } -> std::convertible_to<std::size_t>;
  { h.edge(a, b, cap) } -> std::convertible_to<std::size_t>;
};

/// Production hash.
class MurmurHasher {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x9747b28cULL;

  explicit MurmurHasher(std::uint64_t seed = kDefaultSeed) : seed_(seed) {}

  std::size_t vertex(std::string_view id, std::size_t capacity) const {
    return static_cast<std::size_t>(murmur64a(id.data(), id.size(), seed_) %
                                    capacity);
  }

  std::size_t edge(std::string_view src, std::string_view dst,
                   std::size_t capacity) const {
    thread_local std::string buf;
    edge_bytes(buf, src, dst);
    return static_cast<std::size_t>(murmur64a(buf.data(), buf.size(), seed_) %
                                    capacity);
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Injected lookup-table hash. Listed ids map to their assigned value
/// (reduced modulo capacity); anything else falls through to Murmur.
///
/// Fixture text format, one assignment per line, `#` comments:
///
///     vertex v1 1
///     edge v1 v4 4
class TableHasher {
 public:
  TableHasher() = default;

  TableHasher& assign_vertex(std::string id, std::size_t value) {
    vertices_[std::move(id)] = value;
    return *this;
  }

  TableHasher& assign_edge(std::string_view src, std::string_view dst,
                           std::size_t value) {
    std::string k;
    edge_bytes(k, src, dst);
    edges_[std::move(k)] = value;
    return *this;
  }

  std::size_t vertex(std::string_view id, std::size_t capacity) const {
    if (auto it = vertices_.find(std::string(id)); it != vertices_.end())
      return it->second % capacity;
    return fallback_.vertex(id, capacity);
  }

  std::size_t edge(std::string_view src, std::string_view dst,
                   std::size_t capacity) const {
    thread_local std::string buf;
    edge_bytes(buf, src, dst);
    if (auto it = edges_.find(buf); it != edges_.end())
      return it->second % capacity;
    return fallback_.edge(src, dst, capacity);
  }

  std::size_t size() const noexcept { return vertices_.size() + edges_.size(); }

  static TableHasher parse(std::istream& in) {
    TableHasher h;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ss(line);
      std::string kind;
      if (!(ss >> kind) || kind.front() == '#') continue;
      if (kind == "vertex") {
        std::string id;
        long long v = -1;
        if (!(ss >> id >> v) || v < 0)
          throw ParseError(line_no, "expected `vertex ID INDEX`");
        h.assign_vertex(id, static_cast<std::size_t>(v));
      } else if (kind == "edge") {
        std::string src, dst;
        long long v = -1;
        if (!(ss >> src >> dst >> v) || v < 0)
          throw ParseError(line_no, "expected `edge SRC DST INDEX`");
        h.assign_edge(src, dst, static_cast<std::size_t>(v));
      } else {
        throw ParseError(line_no, "unknown hash fixture entry `" + kind + "`");
      }
      std::string extra;
      if (ss >> extra) throw ParseError(line_no, "trailing field `" + extra + "`");
    }
    return h;
  }

  static TableHasher load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open hash fixture " + path);
    return parse(in);
  }

 private:
  std::unordered_map<std::string, std::size_t> vertices_;
  std::unordered_map<std::string, std::size_t> edges_;
  MurmurHasher fallback_;
};

/// Runtime-selected hash policy, the default for the store aliases.
class HashFn {
 public:
  HashFn() = default;
  HashFn(MurmurHasher h) : impl_(std::move(h)) {}  // NOLINT
  HashFn(TableHasher h) : impl_(std::move(h)) {}   // NOLINT

  std::size_t vertex(std::string_view id, std::size_t capacity) const {
    return std::visit([&](const auto& h) { return h.vertex(id, capacity); },
                      impl_);
  }

  std::size_t edge(std::string_view src, std::string_view dst,
                   std::size_t capacity) const {
    return std::visit(
        [&](const auto& h) { return h.edge(src, dst, capacity); }, impl_);
  }

 private:
  std::variant<MurmurHasher, TableHasher> impl_;
};

static_assert(GraphHasher<MurmurHasher>);
static_assert(GraphHasher<TableHasher>);
static_assert(GraphHasher<HashFn>);

template <GraphHasher H>
std::size_t hash_vertex(const H& h, std::string_view id, std::size_t capacity) {
  return h.vertex(id, capacity);
}

template <GraphHasher H>
std::size_t hash_edge(const H& h, const EdgeKey& key, std::size_t capacity) {
  return h.edge(key.src, key.dst, capacity);
}

}  // namespace dolha
