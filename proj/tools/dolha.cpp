// dolha: replay an edge stream into a store, then query, dump or benchmark it.

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dolha.hpp"
#include "dolha/oracle.hpp"

namespace {

using namespace dolha;
using Clock = std::chrono::steady_clock;

enum class Mode { Snapshot, Persistent };

struct RunConfig {
  Mode mode = Mode::Snapshot;
  std::size_t mv = 1024;
  std::size_t me = 4096;
  std::optional<Timestamp> window;
  std::optional<Timestamp> slide;
  Timestamp t0 = 0;
  std::string hash_fixture;
  std::uint64_t seed = MurmurHasher::kDefaultSeed;
  std::string input;
  bool machine = false;
  bool fixed = false;
  bool progress = false;

  std::optional<WindowConfig> window_config() const {
    if (!window && !slide) return std::nullopt;
    if (!window || !slide) throw ConfigError("--window and --slide go together");
    if (mode == Mode::Snapshot) throw ConfigError("a window needs --mode persistent");
    WindowConfig w{*window, *slide, t0};
    w.validate();
    return w;
  }

  void validate() const {
    if (mv == 0 || me == 0) throw ConfigError("capacities must be positive");
    window_config();
  }

  HashFn hasher() const {
    if (!hash_fixture.empty()) return TableHasher::load(hash_fixture);
    return MurmurHasher(seed);
  }
};

/// Ordered key/value report. Machine mode prints `key=value` lines.
class Report {
 public:
  template <class T>
  void add(std::string key, const T& value) {
    rows_.emplace_back(std::move(key), fmt::format("{}", value));
  }
  void print(std::ostream& os, bool machine) const {
    std::size_t width = 0;
    for (const auto& [k, v] : rows_) width = std::max(width, k.size());
    for (const auto& [k, v] : rows_) {
      if (machine)
        os << k << '=' << v << '\n';
      else
        os << fmt::format("{:<{}}  {}\n", k, width, v);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string rate(std::size_t n, double seconds) {
  if (n == 0 || seconds <= 0) return "N/A";
  return fmt::format("{:.0f}", static_cast<double>(n) / seconds);
}

/// Prints the ingest count to stderr while the main thread replays.
class Progress {
 public:
  Progress(bool enabled, std::size_t total) {
    if (!enabled) return;
    worker_ = std::jthread([this, total](std::stop_token st) {
      while (!st.stop_requested()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
        std::cerr << fmt::format("\r{} / {} events",
                                 done_.load(std::memory_order_relaxed), total)
                  << std::flush;
      }
      std::cerr << '\n';
    });
  }
  void tick(std::size_t n) { done_.store(n, std::memory_order_relaxed); }

 private:
  std::atomic<std::size_t> done_{0};
  std::jthread worker_;
};

struct Outcomes {
  std::map<EdgeOutcome, std::size_t> count;
  ExpiryReport expiry;
  std::size_t events = 0;
  std::size_t peak_vertices = 0;
  std::size_t peak_edges = 0;
  double seconds = 0;
};

std::vector<NumberedEdge> load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("no input stream (use --input)");
  return read_stream_file(cfg.input);
}

[[noreturn]] void rethrow_at(const NumberedEdge& e, const Error& err) {
  throw ParseError(e.line, err.what());
}

Outcomes replay(SnapshotStore& s, const std::vector<NumberedEdge>& in, bool progress) {
  Outcomes o;
  Progress p(progress, in.size());
  const auto start = Clock::now();
  for (const auto& ne : in) {
    try {
      ++o.count[s.process_edge(ne.edge)];
    } catch (const OrderError& err) {
      rethrow_at(ne, err);
    }
    p.tick(++o.events);
    o.peak_vertices = std::max(o.peak_vertices, s.live_vertices());
    o.peak_edges = std::max(o.peak_edges, s.live_edges());
  }
  o.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return o;
}

Outcomes replay(PersistentStore& s, const std::vector<NumberedEdge>& in, bool progress) {
  Outcomes o;
  Progress p(progress, in.size());
  const auto start = Clock::now();
  for (const auto& ne : in) {
    try {
      IngestResult r = s.ingest(ne.edge);
      ++o.count[r.outcome];
      o.expiry += r.expiry;
    } catch (const OrderError& err) {
      rethrow_at(ne, err);
    }
    p.tick(++o.events);
    o.peak_vertices = std::max(o.peak_vertices, s.live_vertices());
  }
  o.peak_edges = s.peak_occupancy();
  o.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return o;
}

void add_outcomes(Report& r, const Outcomes& o, bool persistent) {
  r.add("events", o.events);
  r.add("inserted", o.count.contains(EdgeOutcome::Inserted) ? o.count.at(EdgeOutcome::Inserted) : 0);
  r.add("updated", o.count.contains(EdgeOutcome::Updated) ? o.count.at(EdgeOutcome::Updated) : 0);
  r.add("deleted", o.count.contains(EdgeOutcome::Deleted) ? o.count.at(EdgeOutcome::Deleted) : 0);
  r.add("discarded", o.count.contains(EdgeOutcome::Discarded) ? o.count.at(EdgeOutcome::Discarded) : 0);
  r.add("appended", o.count.contains(EdgeOutcome::Appended) ? o.count.at(EdgeOutcome::Appended) : 0);
  if (persistent) {
    r.add("slides", o.expiry.slides);
    r.add("expired_occurrences", o.expiry.expired_occurrences);
    r.add("purged_occurrences", o.expiry.purged_occurrences);
  }
  r.add("peak_live_vertices", o.peak_vertices);
  r.add(persistent ? "peak_occupancy" : "peak_live_edges", o.peak_edges);
}

void add_timing(Report& r, const Outcomes& o) {
  r.add("elapsed_seconds", fmt::format("{:.6f}", o.seconds));
  r.add("ops_per_sec", rate(o.events, o.seconds));
}

// Query rendering.

void print_rows(std::ostream& os, const std::vector<Neighbor>& rows, bool machine) {
  if (rows.empty() && !machine) os << "none\n";
  for (const auto& n : rows)
    os << (machine ? "id=" : "") << n.id << " w=" << n.w << " t=" << n.t << '\n';
}

void print_vertex(std::ostream& os, const std::optional<VertexInfo>& v) {
  if (!v) {
    os << "absent\n";
    return;
  }
  os << fmt::format("w_out={} w_in={} d_out={} d_in={}\n", v->w_out, v->w_in,
                    v->d_out, v->d_in);
}

void need_args(const std::string& kind, const std::vector<std::string>& args,
               std::size_t n) {
  if (args.size() != n)
    throw UsageError(fmt::format("query {} takes {} argument(s), got {}", kind, n,
                                 args.size()));
}

std::vector<Triangle> all_triangles(const SnapshotStore& s) {
  std::set<Triangle> out;
  for (const auto& c : s.edges()) {
    if (!c.occupied()) continue;
    EdgeKey k{s.vertices()[c.src].id, s.vertices()[c.dst].id};
    for (auto& t : triangles_for_edge(s, k)) out.insert(std::move(t));
  }
  return {out.begin(), out.end()};
}

void query(const SnapshotStore& s, const std::string& kind,
           const std::vector<std::string>& args, bool machine, std::ostream& os) {
  if (kind == "edge") {
    need_args(kind, args, 2);
    auto e = s.edge_query(args[0], args[1]);
    os << (e ? fmt::format("w={} t={}", e->w, e->t) : "absent") << '\n';
  } else if (kind == "vertex") {
    need_args(kind, args, 1);
    print_vertex(os, s.vertex_query(args[0]));
  } else if (kind == "succ") {
    need_args(kind, args, 1);
    print_rows(os, s.successors(args[0]), machine);
  } else if (kind == "prec") {
    need_args(kind, args, 1);
    print_rows(os, s.precursors(args[0]), machine);
  } else if (kind == "triangles") {
    if (!args.empty()) need_args(kind, args, 2);
    auto tris = args.empty() ? all_triangles(s) : triangles_for_edge(s, {args[0], args[1]});
    if (tris.empty() && !machine) os << "none\n";
    for (const auto& t : tris)
      os << (machine ? fmt::format("a={} b={} c={}", t.a, t.b, t.c)
                     : fmt::format("{} -> {} -> {} -> {}", t.a, t.b, t.c, t.a))
         << '\n';
  } else if (kind == "history" || kind == "pattern" || kind == "timequery") {
    throw UsageError("query " + kind + " needs --mode persistent");
  } else {
    throw UsageError("unknown query kind `" + kind + "`");
  }
}

EdgeKey parse_key(const std::string& arg) {
  const auto colon = arg.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == arg.size())
    throw UsageError("expected SRC:DST, got `" + arg + "`");
  return {arg.substr(0, colon), arg.substr(colon + 1)};
}

void query(const PersistentStore& s, const std::string& kind,
           const std::vector<std::string>& args, bool machine, std::ostream& os) {
  if (kind == "edge") {
    need_args(kind, args, 2);
    auto e = s.edge_latest(args[0], args[1]);
    os << (e ? fmt::format("w={} t={}", e->w, e->t) : "absent") << '\n';
  } else if (kind == "vertex") {
    need_args(kind, args, 1);
    print_vertex(os, s.vertex_query(args[0]));
  } else if (kind == "succ") {
    need_args(kind, args, 1);
    print_rows(os, s.successors_latest(args[0]), machine);
  } else if (kind == "prec") {
    need_args(kind, args, 1);
    print_rows(os, s.precursors_latest(args[0]), machine);
  } else if (kind == "history") {
    need_args(kind, args, 2);
    auto h = s.edge_history(args[0], args[1]);
    if (h.empty() && !machine) os << "absent\n";
    for (const auto& o : h) os << fmt::format("t={} w={}\n", o.t, o.w);
  } else if (kind == "pattern") {
    need_args(kind, args, 1);
    const PatternGraph p = PatternGraph::load(args[0]);
    auto found = pattern_match(s, p);
    if (found.empty() && !machine) os << "none\n";
    for (const auto& emb : found) {
      std::string line;
      for (std::size_t i = 0; i < emb.size(); ++i)
        line += fmt::format("{}{}={}", i ? " " : "", p.vertices[i].name, emb[i]);
      os << line << '\n';
    }
  } else if (kind == "timequery") {
    if (args.empty()) throw UsageError("query timequery needs at least one SRC:DST");
    std::vector<EdgeKey> keys;
    for (const auto& a : args) keys.push_back(parse_key(a));
    auto spans = structure_time_query(s, keys);
    if (machine) {
      for (const auto& i : spans) os << fmt::format("start={} end={}\n", i.start, i.end);
    } else if (spans.empty()) {
      os << "none\n";
    } else {
      std::string line;
      for (const auto& i : spans)
        line += fmt::format("{}({},{})", line.empty() ? "" : " ", i.start, i.end);
      os << line << '\n';
    }
  } else if (kind == "triangles") {
    throw UsageError("query triangles needs --mode snapshot");
  } else {
    throw UsageError("unknown query kind `" + kind + "`");
  }
}

// Subcommands.

StoreOptions options(const RunConfig& cfg) { return StoreOptions{!cfg.fixed}; }

template <class F>
void with_store(const RunConfig& cfg, const std::vector<NumberedEdge>& in, F&& f) {
  cfg.validate();
  if (cfg.mode == Mode::Snapshot) {
    SnapshotStore s(cfg.mv, cfg.me, cfg.hasher(), options(cfg));
    Outcomes o = replay(s, in, cfg.progress);
    f(s, o);
  } else {
    PersistentStore s(cfg.mv, cfg.me, cfg.hasher(), cfg.window_config(), options(cfg));
    Outcomes o = replay(s, in, cfg.progress);
    f(s, o);
  }
}

void cmd_replay(const RunConfig& cfg) {
  const auto in = load_input(cfg);
  with_store(cfg, in, [&](const auto& s, const Outcomes& o) {
    using S = std::decay_t<decltype(s)>;
    constexpr bool persistent = std::is_same_v<S, PersistentStore>;
    Report r;
    r.add("mode", persistent ? "persistent" : "snapshot");
    add_outcomes(r, o, persistent);
    r.add("live_vertices", s.live_vertices());
    if constexpr (persistent) {
      r.add("live_keys", s.live_keys());
      r.add("live_occurrences", s.live_occurrences());
    } else {
      r.add("live_edges", s.live_edges());
    }
    r.add("vertex_capacity", s.vertex_capacity());
    r.add("edge_capacity", s.edge_capacity());
    add_timing(r, o);
    r.print(std::cout, cfg.machine);
  });
}

void cmd_query(const RunConfig& cfg, const std::string& kind,
               const std::vector<std::string>& args) {
  const auto in = load_input(cfg);
  with_store(cfg, in, [&](const auto& s, const Outcomes&) {
    query(s, kind, args, cfg.machine, std::cout);
  });
}

void cmd_dump(const RunConfig& cfg) {
  std::vector<NumberedEdge> in;
  if (!cfg.input.empty()) in = load_input(cfg);
  with_store(cfg, in, [&](const auto& s, const Outcomes&) { std::cout << dump_string(s); });
}

struct BenchTiming {
  double total = 0;
  double early = 0;  // events [n/100 * 9, n/10)
  double late = 0;   // events [n * 9/10, n)
};

/// Times `step` over every event, recording the two decade-apart slices.
template <class Step>
BenchTiming time_stream(const std::vector<StreamEdge>& stream, Step&& step) {
  const std::size_t n = stream.size();
  const std::size_t marks[] = {n * 9 / 100, n / 10, n * 9 / 10, n};
  Clock::time_point at[4];
  const auto start = Clock::now();
  std::size_t next = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    while (next < 4 && marks[next] == i) at[next++] = Clock::now();
    if (i < n) step(stream[i]);
  }
  auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  return {secs(start, at[3]), secs(at[0], at[1]), secs(at[2], at[3])};
}

void add_bench(Report& r, const std::string& name, const BenchTiming& bt, std::size_t n) {
  r.add(name + "_seconds", fmt::format("{:.6f}", bt.total));
  r.add(name + "_ops_per_sec", rate(n, bt.total));
  const std::size_t early_n = n / 10 - n * 9 / 100;
  const std::size_t late_n = n - n * 9 / 10;
  if (early_n == 0 || bt.early <= 0) {
    r.add(name + "_amortized_ratio", "N/A");
  } else {
    const double ratio = (bt.late / static_cast<double>(late_n)) /
                         (bt.early / static_cast<double>(early_n));
    r.add(name + "_amortized_ratio", fmt::format("{:.3f}", ratio));
  }
}

void cmd_bench(const RunConfig& cfg, const GeneratorConfig& gen,
               const std::vector<std::string>& structures) {
  std::vector<StreamEdge> stream;
  if (!cfg.input.empty()) {
    for (auto& ne : load_input(cfg)) stream.push_back(std::move(ne.edge));
  } else {
    stream = generate_stream(gen);
  }
  cfg.validate();
  const std::set<std::string> want(structures.begin(), structures.end());
  for (const auto& s : want)
    if (s != "dolha" && s != "baseline") throw UsageError("unknown structure `" + s + "`");

  Report r;
  r.add("mode", cfg.mode == Mode::Snapshot ? "snapshot" : "persistent");
  r.add("events", stream.size());
  if (want.contains("dolha")) {
    std::size_t v = 0, e = 0;
    BenchTiming bt;
    if (cfg.mode == Mode::Snapshot) {
      SnapshotStore s(cfg.mv, cfg.me, cfg.hasher(), options(cfg));
      bt = time_stream(stream, [&](const StreamEdge& x) { s.process_edge(x); });
      v = s.live_vertices();
      e = s.live_edges();
    } else {
      PersistentStore s(cfg.mv, cfg.me, cfg.hasher(), cfg.window_config(), options(cfg));
      bt = time_stream(stream, [&](const StreamEdge& x) { s.ingest(x); });
      v = s.live_vertices();
      e = s.live_occurrences();
    }
    r.add("live_vertices", v);
    r.add("live_edges", e);
    r.add("space_bits", space_bits(v, e));
    r.add("space_bytes", space_bytes(v, e));
    add_bench(r, "dolha", bt, stream.size());
  }
  if (want.contains("baseline")) {
    oracle::BaselineAdjList b;
    auto bt = time_stream(stream, [&](const StreamEdge& x) { b.ingest(x); });
    add_bench(r, "baseline", bt, stream.size());
  }
  r.print(std::cout, cfg.machine);
}

void cmd_generate(const GeneratorConfig& gen, const std::string& output) {
  const auto stream = generate_stream(gen);
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw UsageError("cannot write " + output);
  }
  std::ostream& os = output.empty() ? std::cout : file;
  os << "# src dst t w\n";
  for (const auto& e : stream) write_stream_record(os, e);
}

void add_generator_flags(CLI::App* cmd, GeneratorConfig& g) {
  cmd->add_option("--vertices", g.vertices, "Vertex universe size")->capture_default_str();
  cmd->add_option("--events", g.events, "Number of events")->capture_default_str();
  cmd->add_option("--repeat", g.repeat_ratio, "Share of events reusing a key")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--negative", g.negative_ratio, "Share of negative deltas")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_flag("--bounded", g.bounded_negatives, "Keep running totals non-negative");
  cmd->add_flag("--power-law", g.power_law, "Skewed endpoint choice");
  cmd->add_option("--exponent", g.exponent, "Power-law exponent")->capture_default_str();
  cmd->add_option("--gen-seed", g.seed, "Generator seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replay, query, dump and benchmark Dolha streaming-graph stores"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string mode = "snapshot";
  std::string report = "human";
  app.add_option("--mode", mode, "Store variant")
      ->check(CLI::IsMember({"snapshot", "persistent"}))
      ->capture_default_str();
  app.add_option("--mv", cfg.mv, "Vertex table capacity")->capture_default_str();
  app.add_option("--me", cfg.me, "Edge table capacity")->capture_default_str();
  app.add_option("--window", cfg.window, "Window length (persistent mode)");
  app.add_option("--slide", cfg.slide, "Window slide (persistent mode)");
  app.add_option("--t0", cfg.t0, "Window origin")->capture_default_str();
  app.add_option("--hash-fixture", cfg.hash_fixture, "Lookup-table hash file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", cfg.seed, "Murmur hash seed");
  app.add_option("-i,--input", cfg.input, "Edge stream file (`src dst t w` per line)");
  app.add_option("--report", report, "Report format")
      ->check(CLI::IsMember({"human", "machine"}))
      ->capture_default_str();
  app.add_flag("--fixed", cfg.fixed, "Fail instead of growing a full table");
  app.add_flag("--progress", cfg.progress, "Print ingest progress to stderr");

  auto* replay_cmd = app.add_subcommand("replay", "Ingest the stream and summarize");

  std::string kind;
  std::vector<std::string> qargs;
  auto* query_cmd = app.add_subcommand("query", "Ingest the stream, then run one query");
  query_cmd->add_option("kind", kind, "edge|vertex|succ|prec|history|triangles|pattern|timequery")
      ->required();
  query_cmd->add_option("args", qargs, "Query arguments");

  auto* dump_cmd = app.add_subcommand("dump", "Print the store tables");

  GeneratorConfig bench_gen;
  bench_gen.events = 1'000'000;
  bench_gen.vertices = 100'000;
  std::vector<std::string> structures{"dolha", "baseline"};
  auto* bench_cmd = app.add_subcommand("bench", "Time dolha against the adjacency-list baseline");
  add_generator_flags(bench_cmd, bench_gen);
  bench_cmd->add_option("--structures", structures, "Subset of dolha,baseline")
      ->delimiter(',')
      ->capture_default_str();

  GeneratorConfig gen;
  std::string output;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic edge stream");
  add_generator_flags(gen_cmd, gen);
  gen_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);
  cfg.mode = mode == "persistent" ? Mode::Persistent : Mode::Snapshot;
  cfg.machine = report == "machine";

  try {
    if (*replay_cmd) cmd_replay(cfg);
    if (*query_cmd) cmd_query(cfg, kind, qargs);
    if (*dump_cmd) cmd_dump(cfg);
    if (*bench_cmd) cmd_bench(cfg, bench_gen, structures);
    if (*gen_cmd) cmd_generate(gen, output);
  } catch (const Error& e) {
    std::cerr << "dolha: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
