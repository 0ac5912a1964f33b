#pragma once

// Gate-level single stuck-at faults: universe, frame fault simulation,
// exhaustive equivalence and redundancy removal by constant tying.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gifpo/bitsim.hpp"
#include "gifpo/circuit.hpp"
#include "gifpo/coverage.hpp"
#include "gifpo/netlist.hpp"

namespace gifpo {

struct StuckAtFault {
  NetId net = 0;
  bool value = false;
  bool operator==(const StuckAtFault&) const = default;
};

enum class FaultStatus : std::uint8_t { Undetected, Detected, Untestable };

std::string_view fault_status_name(FaultStatus s);

/// "net-v", as in "a-1".
std::string fault_name(const Netlist& n, const StuckAtFault& f);

/// Both polarities of every net (PIs and POs included), net order, 0 first.
std::vector<StuckAtFault> enumerate_stuckat(const Netlist& n);

struct FaultSimResult {
  std::vector<StuckAtFault> faults;
  std::vector<FaultStatus> status;
  std::vector<std::int64_t> first_cycle;
  std::size_t cycles = 0;

  std::size_t detected() const;
  std::size_t untestable() const;
  /// Cumulative detected count after each cycle.
  std::vector<std::uint64_t> curve() const;
  /// Faults first detected in cycle t.
  std::vector<std::size_t> detected_in(std::size_t t) const;
  /// Percentage over faults not marked untestable.
  double percent() const;
};

/// A fault (net, v) is detected in a frame when the good value of net is !v
/// and complementing net flips at least one PO of that frame.
FaultSimResult fault_simulate(const Netlist& n, const FrameSet& frames, const EngineOptions& opt = {});
FaultSimResult fault_simulate(const Netlist& n, const Stimulus& st, const EngineOptions& opt = {});

/// Per-fault detection rows over all frames (no fault dropping).
std::vector<BitRow> fault_rows(const Netlist& n, const FrameSet& frames, const EngineOptions& opt = {});

/// Fault simulation under all input/state assignments; undetected faults are
/// marked untestable.
FaultSimResult exhaustive_fault_simulate(const Netlist& n, const EngineOptions& opt = {});

struct Counterexample {
  std::uint64_t index = 0;           // exhaustive enumeration index
  std::vector<std::uint8_t> pi_bits;  // pis() order
  std::vector<std::string> differing_pos;
  std::string describe(const Netlist& n) const;
};

/// Compares two netlists with the same PI/PO signature over every input and
/// state assignment (<= 20 bits). Returns the first mismatch.
std::optional<Counterexample> exhaustive_equivalence(const Netlist& a, const Netlist& b);

/// Ties each listed fault's net to its stuck value, propagates constants and
/// sweeps dead logic; throws Error("equivalence") with the counterexample if
/// the result differs from the input.
Netlist remove_redundant(const Netlist& n, std::span<const StuckAtFault> ties);

struct RedundancyRemoval {
  Netlist netlist;
  std::vector<std::string> tied;  // "net-v" of every tie applied
  int rounds = 0;
};

/// Repeats exhaustive fault simulation and tying until no removable
/// untestable fault remains.
RedundancyRemoval remove_all_redundancy(const Netlist& n);

/// Gate-level netlist from a primitive-only Circuit (every net 1 bit; kinds
/// not/assign/and/or/xor/const). Ports named `x[k]` are grouped into field x.
Netlist gate_netlist_from_circuit(const Circuit& c);

/// GNL text of a gate-level netlist.
std::string print_gate_netlist(const Netlist& n);

}  // namespace gifpo
