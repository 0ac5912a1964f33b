#pragma once

// Stimulus sources, coverage-driven cycle selection and test-set compaction.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gifpo/coverage.hpp"
#include "gifpo/gif.hpp"
#include "gifpo/netlist.hpp"

namespace gifpo {

/// Every input and state assignment in enumeration order (<= 20 bits),
/// one field per input port and register.
Stimulus gen_exhaustive(const Netlist& n);

/// `count` uniform vectors from mt19937_64(seed); one draw per field per
/// cycle, masked to the field width.
Stimulus gen_random(const Netlist& n, std::size_t count, std::uint64_t seed);

/// Like gen_random but bit k is one with probability weights[k] (pis()
/// order). A single weight applies to every bit.
Stimulus gen_weighted(const Netlist& n, std::size_t count, std::uint64_t seed, std::span<const double> weights);

/// Sliding-window stimulus for bit-sliced datapaths: for every offset k,
/// all assignments of bits [k, k+window) of every non-state field, other
/// bits from the background (one value per field; missing entries default
/// to all ones for the first field and zero for the rest).
Stimulus gen_bitslice(const Netlist& n, int window, std::span<const std::uint64_t> background = {});

enum class Metric { GifPo, StuckAt };

std::string_view metric_name(Metric m);
Metric metric_from_name(std::string_view s);

struct TestSet {
  Stimulus stimulus;                // every field, one row per kept cycle
  std::vector<std::uint64_t> origin;  // source cycle of each row
  Metric metric = Metric::GifPo;
  std::size_t covered = 0;
  std::size_t total = 0;  // targets in the denominator

  std::size_t size() const { return stimulus.size(); }
  double percent() const { return total == 0 ? 100.0 : 100.0 * static_cast<double>(covered) / total; }
};

/// Cycles whose frame adds at least one newly covered point, in stimulus
/// order. `frames` must be the frames the coverage was computed on.
TestSet greedy_select(const GifPoUniverse& u, const FrameSet& frames, const CoverageDB& db);
TestSet greedy_select(const GifPoUniverse& u, const Stimulus& st, const EngineOptions& opt = {});

/// Cycle indices kept by greedy set cover (largest new contribution first,
/// earliest cycle on ties) followed by reverse-order elimination of cycles
/// whose targets are all covered by the others. Rows are per target, bit t
/// set when cycle t detects it. Result is ascending.
std::vector<std::size_t> compact_cycles(const std::vector<BitRow>& rows, std::size_t cycles);

/// Compacts against GIF-PO points of u.
TestSet compact(const TestSet& ts, const GifPoUniverse& u, const EngineOptions& opt = {});
/// Compacts against the stuck-at faults of a gate-level netlist; faults in
/// `untestable` (by index, may be empty) are left out of the denominator.
TestSet compact(const TestSet& ts, const Netlist& gate, const std::vector<char>& untestable = {},
                const EngineOptions& opt = {});

/// Rows of ts restricted to `keep`, origins carried over.
TestSet subset(const TestSet& ts, std::span<const std::size_t> keep);

/// JSON manifest: origin cycles, metric, coverage.
std::string test_set_manifest(const TestSet& ts);

/// Writes `<base>.stim` and `<base>.json`; format "stim" writes only the
/// stimulus, "json" only the manifest.
void export_test_set(const TestSet& ts, const std::filesystem::path& base, const std::string& format = "both");

}  // namespace gifpo
