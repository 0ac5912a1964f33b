#pragma once

// Flow orchestration: workspaces, run manifests, coverage reports,
// GIF-PO/stuck-at correlation curves and the HTTP service.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gifpo/coverage.hpp"
#include "gifpo/gif.hpp"
#include "gifpo/stuckat.hpp"
#include "gifpo/synth.hpp"
#include "gifpo/tpg.hpp"
#include "json.hpp"

namespace gifpo {

inline constexpr std::string_view kToolVersion = "0.3.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& p);

/// Per-variant stuck-at outcome.
struct VariantResult {
  std::string style;
  std::size_t nets = 0;
  std::size_t faults = 0;
  std::size_t untestable = 0;
  std::size_t detected = 0;
  double percent = 0;
};

struct RunManifest {
  std::string circuit_hash;
  std::string stimulus_hash;
  std::string fpd_hash;  // empty when no FPD
  std::string tool_version = std::string(kToolVersion);
  std::vector<std::uint64_t> seeds;
  std::string started;
  std::string finished;
  CoverageSummary summary;
  std::vector<VariantResult> variants;

  /// Hash over the input hashes, tool version and seeds.
  std::string run_id() const;
  nlohmann::ordered_json to_json() const;
};

/// UTC timestamp, ISO 8601.
std::string utc_now();

struct CurvePoint {
  std::size_t cycle = 0;
  double gifpo = 0;
  double stuckat = 0;
};

/// GIF-PO and stuck-at percentages after each cycle of the same stimulus.
/// Throws Error("cycle-mismatch") if the runs differ in length.
std::vector<CurvePoint> correlation_curve(const GifPoUniverse& u, const CoverageDB& db, const FaultSimResult& fs);
std::string curve_csv(const std::vector<CurvePoint>& c);

/// Maximal runs of >= min_len cycles over which neither curve rises
/// (compaction candidates), as [first, last] cycle pairs.
std::vector<std::pair<std::size_t, std::size_t>> flat_segments(const std::vector<CurvePoint>& c,
                                                               std::size_t min_len = 2);

/// Coverage of one circuit end to end (a row shaped like the coverage
/// results table).
struct ReportOptions {
  StyleKind style = StyleKind::AoTree;
  std::uint64_t seed = 1;
  std::size_t random_cycles = 1000;
  int bitslice_window = 2;
  std::optional<std::filesystem::path> stimulus;  // default: generated
  std::optional<std::filesystem::path> fpd;
  EngineOptions engine;
};

struct ReportRow {
  std::string name;
  std::string stimulus_source;  // exhaustive, bitslice, random or a path
  std::size_t pi_bits = 0;
  std::size_t gifpo_total = 0;
  std::size_t gifpo_redundant = 0;
  std::size_t functional_cycles = 0;
  std::size_t pattern_rtl = 0;
  double coverage_gifpo = 0;
  std::string style;
  std::size_t nets = 0;  // after redundancy removal when exhaustive
  std::size_t tied = 0;  // nets tied by redundancy removal
  std::size_t pattern_netlist = 0;
  double coverage_stuckat = 0;
  std::size_t stuckat_detected = 0;
  std::size_t stuckat_total = 0;
  std::vector<CurvePoint> curve;

  nlohmann::ordered_json to_json() const;
  static std::string header();
  std::string line() const;
};

ReportRow make_report(const std::filesystem::path& circuit, const ReportOptions& opt = {});

/// Resolves a circuit argument: an existing file, else `<name>.gnl` in the
/// bundled circuits directory.
std::filesystem::path resolve_circuit(const std::string& arg);
std::filesystem::path bundled_circuits_dir();

/// A directory holding design.gnl, stimulus files, fpd.txt and runs/.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path design() const { return root_ / "design.gnl"; }
  std::filesystem::path fpd() const { return root_ / "fpd.txt"; }
  std::filesystem::path runs() const { return root_ / "runs"; }
  /// Resolves a stimulus path relative to the workspace; rejects paths
  /// escaping it.
  std::filesystem::path stimulus(const std::string& rel) const;
  /// Newest *.stim in the workspace root (by name if none is newer).
  std::optional<std::filesystem::path> default_stimulus() const;

 private:
  std::filesystem::path root_;
};

/// Exclusive advisory lock on `<dir>/.gifpo.lock`.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const std::filesystem::path& dir);
  ~WorkspaceLock();
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  int fd_ = -1;
};

/// Loaded workspace state: universe with the FPD applied and the latest
/// coverage run.
struct Session {
  std::filesystem::path root;
  std::shared_ptr<const ElaboratedCircuit> circuit;
  GifPoUniverse base;      // before FPD
  GifPoUniverse universe;  // FPD applied
  FalsePathDB fpd;
  std::filesystem::path stimulus_path;
  CoverageDB db;
  RunManifest manifest;

  /// Loads design.gnl, fpd.txt and runs the given (or default) stimulus.
  static Session open(const std::filesystem::path& root, std::optional<std::string> stimulus = std::nullopt,
                      const EngineOptions& opt = {});
  /// Re-runs coverage on a stimulus and writes runs/<id>/.
  void rerun(const std::filesystem::path& stimulus, const EngineOptions& opt = {});
  /// Validates and appends an entry; throws Error("covered-false-path") if it
  /// matches a covered point, Error("no-match") if it matches none.
  std::size_t add_fpd(const FpdEntry& e);

  nlohmann::ordered_json summary_json() const;
  nlohmann::ordered_json point_json(std::size_t p) const;
  nlohmann::ordered_json curve_json() const;
  nlohmann::ordered_json source_json(const std::string& gate) const;
  /// status: open (uncovered, in the denominator), covered, unreachable or
  /// empty for all; gate/po are globs.
  nlohmann::ordered_json points_json(const std::string& status, const std::string& gate, const std::string& po,
                                     std::size_t offset, std::size_t limit) const;

 private:
  void write_run();
};

/// Serves the workspace API until stopped; returns when the listener
/// closes. `on_ready` gets the bound port and a function that stops the
/// listener from any thread.
void serve(const std::filesystem::path& root, const std::string& host, int port,
           const std::function<void(int, std::function<void()>)>& on_ready = {});

}  // namespace gifpo
