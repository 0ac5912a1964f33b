#pragma once

#include <string>
#include <vector>

#include "gifpo/circuit.hpp"
#include "gifpo/netlist.hpp"

namespace gifpo {

/// Primitive-cell decomposition of a Circuit. PIs are input-port bits then
/// register q bits; POs are output-port bits then register d bits. Every cell
/// records the index of the complex gate it came from (Cell::source).
struct ElaboratedCircuit {
  Netlist netlist;
  std::string source_name;
  std::vector<std::string> source_gates;  // instance name per Circuit gate
  std::vector<int> source_lines;          // GNL line per Circuit gate
  std::vector<std::string> source_text;   // GNL source, for display

  /// Name of the complex gate a cell came from, or "" for glue.
  std::string provenance(std::uint32_t cell) const;
};

/// Decomposes every complex gate with a fixed policy:
///  - bitwise n-ary and/or/xor: balanced 2-input trees, left-to-right pairing
///  - not/assign: INV/BUF per bit; mux2: MUX2 per bit
///  - eq: XOR + INV per bit, AND tree; lt: ripple borrow chain
///  - add: HA at bit 0 then an FA chain, carry-out left open
///  - sub: a + ~b + 1 as an FA chain with constant carry-in
///  - shl/shr/slice/concat: wiring only
///  - mul (macro): N x N AND array plus N-1 rows of N-bit adders
ElaboratedCircuit elaborate(const Circuit& c);

/// Exhaustive word-level vs bit-level comparison over all input/state
/// assignments (total bits <= 20). Returns the first mismatching index.
std::optional<std::uint64_t> check_elaboration(const Circuit& c, const ElaboratedCircuit& e);

}  // namespace gifpo
