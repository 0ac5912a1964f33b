#pragma once

// Gate inherent faults (GIFs) and GIF-PO pairs.
//
// A GIF class of a cell is one (output, local minterm) pair together with the
// input pins whose complement flips that output at that minterm. The class
// is detected at PO j when the minterm is applied and the output is
// observable at j; this collapses every member fault of the class.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gifpo/elaborate.hpp"
#include "gifpo/netlist.hpp"

namespace gifpo {

struct GifClassTemplate {
  int go = 0;                 // output pin index
  std::uint32_t minterm = 0;  // local input minterm, pin 0 is the MSB
  bool alpha = false;         // fault-free output at the minterm
  std::uint32_t members = 0;  // bit p set: input pin p is sensitized
};

/// One member of a class: input pin gi sensitized to output go at minterm i.
struct GifFault {
  int gi = 0;
  int go = 0;
  std::uint32_t minterm = 0;
  bool alpha = false;
};

/// Individual faults in class order, members in pin order.
std::vector<GifFault> enumerate_gif_faults(CellKind kind, int arity);

/// Every class of a cell kind, ordered by output then minterm. Minterms with
/// no sensitized pin (e.g. AND at 00) do not form classes.
std::vector<GifClassTemplate> enumerate_gifs(CellKind kind, int arity);

/// Display labels for the member GIFs of each class, as in "A1, B1". A pin's
/// counter runs across all classes of the cell, outputs in order.
std::vector<std::string> gif_labels(CellKind kind, int arity);

/// Pin-letter spelling used in labels (FA's CI is shown as C).
std::string pin_letter(CellKind kind, int pin);

/// Binary spelling of a minterm, pin 0 first.
std::string minterm_string(std::uint32_t minterm, int arity);

struct GifClass {
  std::uint32_t cell = 0;
  std::uint8_t go = 0;
  std::uint32_t minterm = 0;
  bool alpha = false;
  std::uint32_t members = 0;
};

enum class PointStatus : std::uint8_t { Open, UnreachableAuto, UnreachableFpd };

std::string_view point_status_name(PointStatus s);

struct GifPoPoint {
  std::uint32_t cls = 0;
  std::uint32_t po = 0;
  PointStatus status = PointStatus::Open;
};

/// Log line of a reduction pass.
struct ReductionEntry {
  std::string cell;
  std::string action;
  int classes_before = 0;
  int classes_after = 0;
};

struct Reduction {
  ElaboratedCircuit circuit;
  std::vector<ReductionEntry> log;
  int classes_removed() const;
};

/// Replaces cells with constant inputs by simpler cells (FA with a constant
/// input becomes an HA or an XNOR/OR pair, AND with a 0 becomes CONST0, and
/// so on) until no constant reaches a non-constant cell.
Reduction propagate_constants(const ElaboratedCircuit& e);

/// Netlist form of propagate_constants (also used on gate-level netlists).
Netlist propagate_constants(const Netlist& n, std::vector<ReductionEntry>* log = nullptr);

/// Removes cells none of whose outputs reach a PO, and logs the classes of
/// open outputs of multi-output cells (they form no GIF-PO points).
Reduction propagate_opens(const ElaboratedCircuit& e);

/// The enumerable set of GIF-PO points of a circuit. Points are ordered by
/// cell, output, minterm, then PO index; points of one class are contiguous.
class GifPoUniverse {
 public:
  std::shared_ptr<const ElaboratedCircuit> circuit;
  std::vector<GifClass> classes;
  std::vector<GifPoPoint> points;
  std::vector<std::uint32_t> class_first_point;  // size classes + 1
  std::vector<std::uint32_t> cell_first_class;   // size cells + 1
  std::vector<ReductionEntry> reduction_log;

  const Netlist& netlist() const { return circuit->netlist; }
  std::size_t size() const { return points.size(); }
  std::size_t count(PointStatus s) const;
  /// Points that enter the coverage denominator.
  std::size_t open_count() const { return count(PointStatus::Open); }
  std::size_t unreachable_count() const { return size() - open_count(); }

  NetId go_net(std::uint32_t cls) const;
  std::string cell_name(std::size_t point) const;
  std::string out_pin(std::size_t point) const;
  std::string minterm(std::size_t point) const;
  std::string po_name(std::size_t point) const;
  /// Member labels of the point's class, e.g. "A3, B3".
  std::string members(std::size_t point) const;
  /// Point indices grouped by PO index.
  std::vector<std::vector<std::uint32_t>> points_by_po() const;
};

/// Builds the universe of an elaborated circuit as given (no reductions).
GifPoUniverse build_universe(std::shared_ptr<const ElaboratedCircuit> e);

/// Runs constant then open propagation and builds the universe.
GifPoUniverse build_reduced_universe(const ElaboratedCircuit& e);

/// Points in the structural fanout of each net: PO bitsets, one row per net.
std::vector<std::vector<std::uint64_t>> structural_po_reach(const Netlist& n);

// ---- false-path database -------------------------------------------------

struct FpdEntry {
  std::string gate;  // fnmatch glob on cell names
  std::string out;   // output pin
  std::string m;     // minterm binary (glob)
  std::string po;    // fnmatch glob on PO names
  std::string reason;
  std::string author;
  int line = 0;
};

struct FalsePathDB {
  std::vector<FpdEntry> entries;

  static constexpr std::string_view kHeader = "# gifpo-fpd v1";

  static FalsePathDB parse(std::string_view text);
  static FalsePathDB load(const std::filesystem::path& p);
  std::string serialize() const;
  void save(const std::filesystem::path& p) const;
  static std::string format_entry(const FpdEntry& e);
};

bool fpd_matches(const FpdEntry& e, const GifPoUniverse& u, std::size_t point);

struct FpdApplication {
  GifPoUniverse universe;
  std::vector<std::size_t> matches;  // per entry
  std::vector<std::size_t> stale;    // entries matching no point
  std::size_t marked = 0;
};

/// Marks every open point matched by an entry as unreachable-fpd. If
/// `covered` is given and a matched point is covered, throws
/// Error("covered-false-path").
FpdApplication apply_fpd(const GifPoUniverse& u, const FalsePathDB& db, const std::vector<char>* covered = nullptr);

/// One entry per open point that `covered` leaves uncovered.
FalsePathDB suggest_fpd(const GifPoUniverse& u, const std::vector<char>& covered, std::string_view reason,
                        std::string_view author);

/// Marks every open, uncovered point unreachable-auto (exhaustive stimulus
/// only: an uncovered point there can never be detected).
GifPoUniverse mark_unreachable_auto(const GifPoUniverse& u, const std::vector<char>& covered);

}  // namespace gifpo
