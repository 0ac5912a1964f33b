#pragma once

// Single-bit netlist of primitive cells. Used both for elaborated RTL (the
// HA/FA/MUX2 library that carries gate inherent faults) and for gate-level
// implementations (AND/OR/XOR/INV/BUF/CONST) checked by the stuck-at oracle.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gifpo {

using NetId = std::uint32_t;

enum class CellKind : std::uint8_t { Const0, Const1, Buf, Inv, And, Or, Xor, Mux2, Ha, Fa };

std::string_view cell_kind_name(CellKind kind);
std::optional<CellKind> cell_kind_from_name(std::string_view name);

int cell_output_count(CellKind kind);
/// Pin names in declaration order. Minterms read pins left to right as MSB to
/// LSB, so for AND(A, B) minterm 0b01 means A=0, B=1. FA pins are (CI, A, B).
std::vector<std::string> cell_input_pins(CellKind kind, int arity);
std::vector<std::string> cell_output_pins(CellKind kind);

/// Fault-free outputs of a cell at a local minterm; bit o is output o.
std::uint32_t eval_cell_local(CellKind kind, int arity, std::uint32_t minterm);

struct Cell {
  CellKind kind = CellKind::Buf;
  std::string name;
  std::vector<NetId> in;
  std::uint32_t inv = 0;  // input inversion bubbles (gate-level AND/OR only)
  std::vector<NetId> out;
  int source = -1;  // provenance: index of the originating complex gate
};

/// A named group of PI bits (a port or a register), LSB first.
struct InputField {
  std::string name;
  std::vector<std::uint32_t> bits;  // indices into pis()
  bool is_state = false;
};

struct OutputField {
  std::string name;
  std::vector<std::uint32_t> bits;  // indices into pos()
};

struct StateBit {
  std::string name;
  NetId q = 0;
  NetId d = 0;
  bool init = false;
};

class Netlist {
 public:
  std::string name;

  NetId add_net(std::string net_name);
  std::size_t add_cell(Cell cell);
  /// Appends a primary input bit. State bits must come after all input bits.
  std::uint32_t add_pi(NetId net, bool is_state = false);
  std::uint32_t add_po(NetId net, std::string po_name);
  void add_input_field(InputField f) { input_fields_.push_back(std::move(f)); }
  void add_output_field(OutputField f) { output_fields_.push_back(std::move(f)); }
  void add_state_bit(StateBit s) { state_.push_back(std::move(s)); }

  /// Computes drivers, fanouts and topological order; checks single driver
  /// and acyclicity. Must be called after any mutation.
  void finalize();
  bool finalized() const { return finalized_; }

  std::size_t num_nets() const { return net_names_.size(); }
  const std::string& net_name(NetId n) const { return net_names_[n]; }
  void rename_net(NetId n, std::string s) { net_names_[n] = std::move(s); }
  std::optional<NetId> find_net(std::string_view n) const;

  const std::vector<Cell>& cells() const { return cells_; }
  std::vector<Cell>& mutable_cells() {
    finalized_ = false;
    return cells_;
  }
  const std::vector<NetId>& pis() const { return pis_; }
  std::size_t num_input_bits() const { return num_input_bits_; }
  std::size_t num_state_bits() const { return pis_.size() - num_input_bits_; }
  const std::vector<NetId>& pos() const { return pos_; }
  const std::vector<std::string>& po_names() const { return po_names_; }
  const std::vector<InputField>& input_fields() const { return input_fields_; }
  const std::vector<OutputField>& output_fields() const { return output_fields_; }
  const std::vector<StateBit>& state() const { return state_; }

  // Derived data (valid after finalize()).
  /// Driving cell of a net, or -1 for primary inputs.
  int driver(NetId n) const { return driver_[n]; }
  struct Sink {
    std::uint32_t cell;
    std::uint32_t pin;
  };
  const std::vector<Sink>& fanout(NetId n) const { return fanout_[n]; }
  const std::vector<std::uint32_t>& topo() const { return topo_; }
  /// Position of each cell in topo().
  std::uint32_t topo_rank(std::uint32_t cell) const { return rank_[cell]; }
  /// PO indices that read this net directly.
  const std::vector<std::uint32_t>& po_indices(NetId n) const { return po_of_net_[n]; }
  bool is_pi(NetId n) const { return pi_index_[n] >= 0; }
  int pi_index(NetId n) const { return pi_index_[n]; }

  /// Gate-level check: only CONST/BUF/INV/AND/OR/XOR cells.
  bool is_gate_level() const;

 private:
  std::vector<std::string> net_names_;
  std::vector<Cell> cells_;
  std::vector<NetId> pis_;
  std::size_t num_input_bits_ = 0;
  std::vector<NetId> pos_;
  std::vector<std::string> po_names_;
  std::vector<InputField> input_fields_;
  std::vector<OutputField> output_fields_;
  std::vector<StateBit> state_;

  bool finalized_ = false;
  std::vector<int> driver_;
  std::vector<std::vector<Sink>> fanout_;
  std::vector<std::uint32_t> topo_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::vector<std::uint32_t>> po_of_net_;
  std::vector<int> pi_index_;
};

struct Force {
  NetId net;
  bool value;
};

/// Every net valued for one combinational frame.
struct FrameValues {
  std::vector<std::uint8_t> net;
  std::vector<std::uint8_t> po;
  std::vector<std::uint8_t> next_state;
};

/// Scalar reference evaluation of one frame. `pi_bits` covers input bits
/// followed by state bits (the pis() order). A force pins one net.
FrameValues evaluate_frame(const Netlist& n, std::span<const std::uint8_t> pi_bits,
                           std::optional<Force> force = std::nullopt);

/// Convenience overload with inputs and register state given separately.
FrameValues evaluate_frame(const Netlist& n, std::span<const std::uint8_t> inputs,
                           std::span<const std::uint8_t> state, std::optional<Force> force = std::nullopt);

/// Maps an exhaustive-enumeration index onto PI bits: fields in declaration
/// order, the first field most significant, each field LSB first.
std::vector<std::uint8_t> pi_bits_from_index(const Netlist& n, std::uint64_t index);

/// Bit position inside the enumeration index of each PI (inverse layout of
/// pi_bits_from_index).
std::vector<int> pi_index_positions(const Netlist& n);

/// Removes cells whose outputs reach no PO. Returns removed cell names.
std::vector<std::string> sweep_dead_cells(Netlist& n);

/// Drops the flagged cells and any net no longer referenced (PIs, POs and
/// register nets are always kept), then re-finalizes.
void remove_cells(Netlist& n, const std::vector<char>& drop);

}  // namespace gifpo
