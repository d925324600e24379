#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dolha {

/// Opaque vertex identifier (account number, IP address, "v1", ...).
/// Compared byte-for-byte.
using VertexId = std::string;

/// Logical event time. Carries no unit.
using Timestamp = std::uint64_t;

/// Signed weight delta carried by a stream event.
using Weight = std::int64_t;

/// Slot index into one of the flat tables.
using Index = std::uint32_t;

/// Absent link ("/" in the table dumps).
inline constexpr Index kNil = std::numeric_limits<Index>::max();

inline constexpr Timestamp kEndOfTime = std::numeric_limits<Timestamp>::max();

/// Directed edge u -> v. (u, v) and (v, u) are different keys; u == v is allowed.
struct EdgeKey {
  VertexId src;
  VertexId dst;

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const EdgeKey& k) {
  return os << k.src << "->" << k.dst;
}

/// One stream event: key, arrival time, weight delta.
struct StreamEdge {
  EdgeKey key;
  Timestamp t = 0;
  Weight w = 0;

  friend bool operator==(const StreamEdge&, const StreamEdge&) = default;
};

enum class EdgeOutcome { Inserted, Updated, Deleted, Discarded, Appended };

inline const char* to_string(EdgeOutcome o) {
  switch (o) {
    case EdgeOutcome::Inserted: return "inserted";
    case EdgeOutcome::Updated: return "updated";
    case EdgeOutcome::Deleted: return "deleted";
    case EdgeOutcome::Discarded: return "discarded";
    case EdgeOutcome::Appended: return "appended";
  }
  return "?";
}

// Errors. Everything the library throws derives from dolha::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (zero capacity, bad window).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Event timestamp smaller than one already processed.
class OrderError : public Error {
 public:
  OrderError(Timestamp got, Timestamp last)
      : Error("out-of-order timestamp " + std::to_string(got) +
              " after " + std::to_string(last)),
        got_(got),
        last_(last) {}

  Timestamp got() const noexcept { return got_; }
  Timestamp last() const noexcept { return last_; }

 private:
  Timestamp got_;
  Timestamp last_;
};

/// Table full with growth disabled.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Operation not valid in the current configuration or with these arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dolha
