#pragma once

// Lowering of an elaborated circuit to permissible gate-level netlists.

#include <cstdint>
#include <string>
#include <vector>

#include "gifpo/elaborate.hpp"
#include "gifpo/netlist.hpp"

namespace gifpo {

enum class StyleKind { Ripple, TwoLevel, AoTree, Rewrite };

struct SynthStyle {
  StyleKind kind = StyleKind::Ripple;
  std::uint64_t seed = 0;  // REWRITE only
  int steps = 0;           // REWRITE only
  int max_terms = 32;      // TWO-LEVEL: cubes per node before it is kept as a net
  int cone_pi_limit = 16;  // TWO-LEVEL: structural support limit per PO

  /// "RIPPLE", "TWO-LEVEL", "AOTREE" or "REWRITE(seed=1,steps=40)".
  std::string label() const;
  /// Net-name prefix: ripple, two-level, aotree, rewrite.
  std::string prefix() const;
  /// Accepts ripple, two-level, aotree, rewrite (case-insensitive).
  static SynthStyle parse(const std::string& name, std::uint64_t seed = 0, int steps = 0);
};

/// Lowers to AND/OR/XOR/INV/BUF/CONST cells:
///  - RIPPLE: HA = XOR + AND; FA = two XORs, two ANDs and an OR; MUX2 = INV,
///    two ANDs and an OR
///  - TWO-LEVEL: each node flattened into a sum of products over PIs and
///    kept nets; negated internal nodes and nodes over `max_terms` cubes are
///    kept as nets
///  - AOTREE: AND/OR/INV only; every carry of an HA/FA chain gets its own
///    AND-OR tree over the operand bits
///  - REWRITE: RIPPLE followed by `steps` random local rewrites (DeMorgan,
///    XOR expansion, factor, unfactor, buffer insertion, driver
///    duplication), each checked by truth table over its support
/// Register boundaries are kept. Throws Error("cone-too-wide") for TWO-LEVEL
/// when a PO depends on more than cone_pi_limit PI bits.
Netlist lower(const ElaboratedCircuit& e, const SynthStyle& style, std::vector<std::string>* rewrites = nullptr);

struct Variant {
  SynthStyle style;
  Netlist netlist;
  std::vector<std::string> rewrites;  // REWRITE log, "rule target"
  bool checked = false;               // exhaustively equivalence-checked
};

/// k distinct variants: RIPPLE, TWO-LEVEL, REWRITE(seed), AOTREE,
/// REWRITE(seed+1), REWRITE(seed+2), ... Styles that do not apply (a cone
/// too wide for TWO-LEVEL) or that repeat an earlier netlist are replaced by
/// further REWRITE seeds. Every REWRITE duplicates at least one driver. Each
/// variant is checked against the elaborated circuit when it has <= 20 PI
/// bits; a mismatch throws Error("equivalence").
std::vector<Variant> variant_suite(const ElaboratedCircuit& e, int k, std::uint64_t seed);

/// REWRITE step count used by variant_suite.
int default_rewrite_steps(const Netlist& ripple);

}  // namespace gifpo
