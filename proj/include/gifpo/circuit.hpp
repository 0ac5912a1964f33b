#pragma once

// Word-level circuit of complex gates, read from the GNL netlist language.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gifpo {

enum class GateKind {
  Not,
  And,
  Or,
  Xor,
  RAnd,
  ROr,
  RXor,
  Mux2,
  Eq,
  Lt,
  Add,
  Sub,
  Shl,
  Shr,
  Const,
  Assign,
  Slice,
  Concat,
  Mul,  // library macro, expanded by elaborate()
};

std::string_view kind_name(GateKind kind);
std::optional<GateKind> kind_from_name(std::string_view name);

enum class NetRole { Input, Output, Wire };

struct NetDecl {
  std::string name;
  int width = 1;
  NetRole role = NetRole::Wire;
  int line = 0;
};

struct Operand {
  int net = -1;
  bool inverted = false;  // only legal on and/or inputs
};

struct GateInstance {
  std::string instance;
  GateKind kind = GateKind::Assign;
  int param = 0;              // shift amount (shl/shr) or low bit (slice)
  std::uint64_t literal = 0;  // const value
  int output = -1;
  std::vector<Operand> inputs;
  int line = 0;
};

struct Register {
  std::string instance;
  int q = -1;
  int d = -1;
  std::uint64_t init = 0;
  int line = 0;
};

/// A validated word-level design. Invariants (checked by parse_circuit and
/// validate): single driver per net, acyclic between register/port
/// boundaries, widths consistent with each gate kind, widths <= 64.
struct Circuit {
  std::string name;
  std::vector<NetDecl> nets;
  std::vector<int> inputs;   // input ports, declaration order
  std::vector<int> outputs;  // output ports, declaration order
  std::vector<Register> registers;
  std::vector<GateInstance> gates;  // const declarations appear as Const gates
  std::vector<std::string> source_lines;

  // Filled in by validate().
  std::vector<int> topo_order;  // gate indices

  int net_id(std::string_view name) const;
  int width(int net) const { return nets[static_cast<size_t>(net)].width; }
  int input_bits() const;
  int state_bits() const;
};

/// Parses GNL source. Throws ParseError with a diagnostic code on failure:
/// syntax, unknown-kind, arity, width-mismatch, undeclared-net,
/// duplicate-name, multiple-drivers, undriven-net, combinational-cycle.
Circuit parse_circuit(std::string_view text);
Circuit load_circuit(const std::filesystem::path& path);

/// Checks every invariant and computes topo_order.
void validate(Circuit& c);

/// Canonical GNL text; parse(print(parse(x))) == parse(x).
std::string print_circuit(const Circuit& c);

struct WordFrame {
  std::vector<std::uint64_t> values;      // per net
  std::vector<std::uint64_t> next_state;  // per register
};

/// Word-level reference semantics of one clock cycle.
WordFrame evaluate_words(const Circuit& c, std::span<const std::uint64_t> inputs,
                         std::span<const std::uint64_t> state);

inline std::uint64_t width_mask(int w) {
  return w >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << w) - 1);
}

}  // namespace gifpo
