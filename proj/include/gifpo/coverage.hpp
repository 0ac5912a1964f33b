#pragma once

// Stimulus files and GIF-PO coverage recording.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gifpo/bitsim.hpp"
#include "gifpo/gif.hpp"
#include "gifpo/netlist.hpp"

namespace gifpo {

/// Per-cycle port values. Header `inputs <field> ...` names input ports and,
/// optionally, registers (scan injection). Each cycle line holds one hex
/// value per field, LSB-first within the field.
struct Stimulus {
  std::vector<std::string> fields;
  std::vector<std::vector<std::uint64_t>> cycles;

  std::size_t size() const { return cycles.size(); }
  static Stimulus parse(std::string_view text);
  static Stimulus load(const std::filesystem::path& p);
  std::string serialize() const;
  void save(const std::filesystem::path& p) const;
};

/// Binds a stimulus to a netlist and produces one frame (full PI vector) per
/// cycle. Every input port must appear in the header. Registers named in the
/// header take their value from the stimulus; the others carry state from
/// the previous cycle, starting at their init value.
FrameSet bind_stimulus(const Netlist& n, const Stimulus& st, int lanes = 64);

/// Inverse of bind_stimulus for full frames: header lists every input field,
/// registers included when the netlist has state.
Stimulus frames_to_stimulus(const Netlist& n, const FrameSet& frames, std::span<const std::size_t> select = {});

class CoverageDB {
 public:
  CoverageDB() = default;
  explicit CoverageDB(std::size_t points) : first_cycle_(points, -1), po_value_(points, 0) {}

  std::size_t size() const { return first_cycle_.size(); }
  std::size_t cycles() const { return cycles_; }
  void set_cycles(std::size_t n) { cycles_ = n; }

  bool covered(std::size_t point) const { return first_cycle_[point] >= 0; }
  std::int64_t first_cycle(std::size_t point) const { return first_cycle_[point]; }
  /// Fault-free PO value at the first covering cycle (the quintuple's alpha).
  bool po_value(std::size_t point) const { return po_value_[point] != 0; }
  /// Records a detection; keeps the earliest cycle.
  void record(std::size_t point, std::int64_t cycle, bool value);
  std::size_t covered_count() const;
  std::vector<char> covered_mask() const;

  /// Cumulative covered count after each cycle.
  std::vector<std::uint64_t> curve() const;
  /// Points first covered in each cycle.
  std::vector<std::uint64_t> new_per_cycle() const;

  /// Union; the earliest first-cycle wins.
  void merge(const CoverageDB& other);

  bool operator==(const CoverageDB& o) const {
    return cycles_ == o.cycles_ && first_cycle_ == o.first_cycle_ && po_value_ == o.po_value_;
  }

 private:
  std::size_t cycles_ = 0;
  std::vector<std::int64_t> first_cycle_;
  std::vector<std::uint8_t> po_value_;
};

struct CoverageSummary {
  std::size_t total = 0;
  std::size_t unreachable = 0;
  std::size_t open = 0;  // denominator
  std::size_t covered = 0;
  std::size_t cycles = 0;
  double percent() const { return open == 0 ? 100.0 : 100.0 * static_cast<double>(covered) / open; }
};

CoverageSummary summarize(const GifPoUniverse& u, const CoverageDB& db);

/// PO indices whose value flips when net s is complemented in frame f
/// (fanout-cone re-simulation).
std::vector<std::uint32_t> observability(const Netlist& n, const FrameValues& f, NetId s);

/// Open points covered by one frame.
std::vector<std::size_t> cover_cycle(const GifPoUniverse& u, const FrameValues& f);

struct EngineOptions {
  int lanes = 64;
  unsigned threads = 1;
};

/// Coverage of every open point over all frames, first cycle recorded.
CoverageDB run_coverage(const GifPoUniverse& u, const FrameSet& frames, const EngineOptions& opt = {});
CoverageDB run_coverage(const GifPoUniverse& u, const Stimulus& st, const EngineOptions& opt = {});

/// Full detection matrix: row per point (open points only; others empty),
/// bit t set when frame t covers the point.
std::vector<BitRow> coverage_rows(const GifPoUniverse& u, const FrameSet& frames, const EngineOptions& opt = {});

}  // namespace gifpo
