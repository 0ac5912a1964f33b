#include "gifpo/netlist.hpp"

#include <algorithm>
#include <cassert>

#include "gifpo/error.hpp"

namespace gifpo {

namespace {

struct KindInfo {
  CellKind kind;
  std::string_view name;
  int outputs;
};

constexpr KindInfo kCellKinds[] = {
    {CellKind::Const0, "CONST0", 1}, {CellKind::Const1, "CONST1", 1}, {CellKind::Buf, "BUF", 1},
    {CellKind::Inv, "INV", 1},       {CellKind::And, "AND", 1},       {CellKind::Or, "OR", 1},
    {CellKind::Xor, "XOR", 1},       {CellKind::Mux2, "MUX2", 1},     {CellKind::Ha, "HA", 2},
    {CellKind::Fa, "FA", 2},
};

}  // namespace

std::string_view cell_kind_name(CellKind kind) {
  for (const auto& k : kCellKinds)
    if (k.kind == kind) return k.name;
  return "?";
}

std::optional<CellKind> cell_kind_from_name(std::string_view name) {
  for (const auto& k : kCellKinds)
    if (k.name == name) return k.kind;
  return std::nullopt;
}

int cell_output_count(CellKind kind) {
  for (const auto& k : kCellKinds)
    if (k.kind == kind) return k.outputs;
  return 1;
}

std::vector<std::string> cell_input_pins(CellKind kind, int arity) {
  switch (kind) {
    case CellKind::Const0:
    case CellKind::Const1:
      return {};
    case CellKind::Buf:
    case CellKind::Inv:
      return {"A"};
    case CellKind::Mux2:
      return {"S", "A", "B"};
    case CellKind::Ha:
      return {"A", "B"};
    case CellKind::Fa:
      return {"CI", "A", "B"};
    default: {
      std::vector<std::string> pins;
      for (int i = 0; i < arity; ++i) pins.emplace_back(1, static_cast<char>('A' + i));
      return pins;
    }
  }
}

std::vector<std::string> cell_output_pins(CellKind kind) {
  if (kind == CellKind::Ha || kind == CellKind::Fa) return {"S", "CO"};
  return {"Y"};
}

std::uint32_t eval_cell_local(CellKind kind, int arity, std::uint32_t m) {
  auto bit = [&](int pin) { return (m >> (arity - 1 - pin)) & 1u; };
  switch (kind) {
    case CellKind::Const0: return 0;
    case CellKind::Const1: return 1;
    case CellKind::Buf: return bit(0);
    case CellKind::Inv: return bit(0) ^ 1u;
    case CellKind::And: {
      std::uint32_t all = (1u << arity) - 1;
      return (m & all) == all ? 1u : 0u;
    }
    case CellKind::Or: return m != 0 ? 1u : 0u;
    case CellKind::Xor: {
      std::uint32_t p = 0;
      for (int i = 0; i < arity; ++i) p ^= bit(i);
      return p;
    }
    case CellKind::Mux2: return bit(0) ? bit(2) : bit(1);
    case CellKind::Ha: {
      std::uint32_t a = bit(0), b = bit(1);
      return (a ^ b) | ((a & b) << 1);
    }
    case CellKind::Fa: {
      std::uint32_t ci = bit(0), a = bit(1), b = bit(2);
      std::uint32_t s = ci ^ a ^ b;
      std::uint32_t co = (a & b) | (ci & (a ^ b));
      return s | (co << 1);
    }
  }
  return 0;
}

NetId Netlist::add_net(std::string net_name) {
  finalized_ = false;
  net_names_.push_back(std::move(net_name));
  return static_cast<NetId>(net_names_.size() - 1);
}

std::size_t Netlist::add_cell(Cell cell) {
  finalized_ = false;
  cells_.push_back(std::move(cell));
  return cells_.size() - 1;
}

std::uint32_t Netlist::add_pi(NetId net, bool is_state) {
  finalized_ = false;
  if (!is_state) {
    if (num_input_bits_ != pis_.size()) throw Error("internal", "input bits must precede state bits");
    ++num_input_bits_;
  }
  pis_.push_back(net);
  return static_cast<std::uint32_t>(pis_.size() - 1);
}

std::uint32_t Netlist::add_po(NetId net, std::string po_name) {
  finalized_ = false;
  pos_.push_back(net);
  po_names_.push_back(std::move(po_name));
  return static_cast<std::uint32_t>(pos_.size() - 1);
}

std::optional<NetId> Netlist::find_net(std::string_view n) const {
  for (NetId i = 0; i < net_names_.size(); ++i)
    if (net_names_[i] == n) return i;
  return std::nullopt;
}

bool Netlist::is_gate_level() const {
  for (const auto& c : cells_) {
    switch (c.kind) {
      case CellKind::Mux2:
      case CellKind::Ha:
      case CellKind::Fa:
        return false;
      default:
        break;
    }
  }
  return true;
}

void Netlist::finalize() {
  const auto n = net_names_.size();
  driver_.assign(n, -1);
  fanout_.assign(n, {});
  pi_index_.assign(n, -1);
  po_of_net_.assign(n, {});
  for (std::size_t i = 0; i < pis_.size(); ++i) {
    if (pi_index_[pis_[i]] >= 0) throw Error("multiple-drivers", "net '" + net_names_[pis_[i]] + "' is a PI twice");
    pi_index_[pis_[i]] = static_cast<int>(i);
  }
  for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
    const auto& c = cells_[ci];
    if (static_cast<int>(c.out.size()) != cell_output_count(c.kind))
      throw Error("internal", "cell '" + c.name + "' has wrong output count");
    for (NetId o : c.out) {
      if (driver_[o] >= 0 || pi_index_[o] >= 0)
        throw Error("multiple-drivers", "net '" + net_names_[o] + "' has multiple drivers");
      driver_[o] = static_cast<int>(ci);
    }
    for (std::size_t p = 0; p < c.in.size(); ++p)
      fanout_[c.in[p]].push_back({static_cast<std::uint32_t>(ci), static_cast<std::uint32_t>(p)});
  }
  for (std::size_t j = 0; j < pos_.size(); ++j) po_of_net_[pos_[j]].push_back(static_cast<std::uint32_t>(j));

  // Kahn's algorithm; ties resolved by cell index for a stable order.
  std::vector<int> indeg(cells_.size(), 0);
  for (std::size_t ci = 0; ci < cells_.size(); ++ci)
    for (NetId i : cells_[ci].in)
      if (driver_[i] >= 0) ++indeg[ci];
  topo_.clear();
  topo_.reserve(cells_.size());
  std::vector<std::uint32_t> ready;
  for (std::size_t ci = cells_.size(); ci-- > 0;)
    if (indeg[ci] == 0) ready.push_back(static_cast<std::uint32_t>(ci));
  while (!ready.empty()) {
    auto ci = ready.back();
    ready.pop_back();
    topo_.push_back(ci);
    std::vector<std::uint32_t> next;
    for (NetId o : cells_[ci].out)
      for (const auto& s : fanout_[o])
        if (--indeg[s.cell] == 0) next.push_back(s.cell);
    std::sort(next.rbegin(), next.rend());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    ready.insert(ready.end(), next.begin(), next.end());
  }
  if (topo_.size() != cells_.size()) {
    for (std::size_t ci = 0; ci < cells_.size(); ++ci)
      if (indeg[ci] > 0) throw Error("combinational-cycle", "cell '" + cells_[ci].name + "' is on a cycle");
  }
  rank_.assign(cells_.size(), 0);
  for (std::size_t i = 0; i < topo_.size(); ++i) rank_[topo_[i]] = static_cast<std::uint32_t>(i);
  finalized_ = true;
}

FrameValues evaluate_frame(const Netlist& nl, std::span<const std::uint8_t> pi_bits, std::optional<Force> force) {
  assert(nl.finalized());
  if (pi_bits.size() != nl.pis().size()) throw Error("width-mismatch", "frame width does not match PI count");
  FrameValues f;
  f.net.assign(nl.num_nets(), 0);
  for (std::size_t i = 0; i < pi_bits.size(); ++i) f.net[nl.pis()[i]] = pi_bits[i] & 1;
  if (force && nl.driver(force->net) < 0) f.net[force->net] = force->value;
  for (auto ci : nl.topo()) {
    const auto& c = nl.cells()[ci];
    const int arity = static_cast<int>(c.in.size());
    std::uint32_t m = 0;
    for (int p = 0; p < arity; ++p) {
      std::uint32_t b = f.net[c.in[static_cast<size_t>(p)]] ^ ((c.inv >> p) & 1u);
      m = (m << 1) | b;
    }
    std::uint32_t outs = eval_cell_local(c.kind, arity, m);
    for (std::size_t o = 0; o < c.out.size(); ++o) {
      std::uint8_t v = static_cast<std::uint8_t>((outs >> o) & 1u);
      if (force && force->net == c.out[o]) v = force->value;
      f.net[c.out[o]] = v;
    }
  }
  f.po.resize(nl.pos().size());
  for (std::size_t j = 0; j < nl.pos().size(); ++j) f.po[j] = f.net[nl.pos()[j]];
  f.next_state.resize(nl.state().size());
  for (std::size_t s = 0; s < nl.state().size(); ++s) f.next_state[s] = f.net[nl.state()[s].d];
  return f;
}

FrameValues evaluate_frame(const Netlist& nl, std::span<const std::uint8_t> inputs,
                           std::span<const std::uint8_t> state, std::optional<Force> force) {
  if (inputs.size() != nl.num_input_bits() || state.size() != nl.num_state_bits())
    throw Error("width-mismatch", "input/state widths do not match netlist");
  std::vector<std::uint8_t> bits(inputs.begin(), inputs.end());
  bits.insert(bits.end(), state.begin(), state.end());
  return evaluate_frame(nl, bits, force);
}

std::vector<int> pi_index_positions(const Netlist& nl) {
  std::vector<int> pos(nl.pis().size(), -1);
  int total = 0;
  for (const auto& f : nl.input_fields()) total += static_cast<int>(f.bits.size());
  int top = total;
  for (const auto& f : nl.input_fields()) {
    top -= static_cast<int>(f.bits.size());
    for (std::size_t k = 0; k < f.bits.size(); ++k) pos[f.bits[k]] = top + static_cast<int>(k);
  }
  for (int p : pos)
    if (p < 0) throw Error("internal", "PI not covered by an input field");
  return pos;
}

std::vector<std::uint8_t> pi_bits_from_index(const Netlist& nl, std::uint64_t index) {
  auto pos = pi_index_positions(nl);
  std::vector<std::uint8_t> bits(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) bits[i] = static_cast<std::uint8_t>((index >> pos[i]) & 1u);
  return bits;
}

std::vector<std::string> sweep_dead_cells(Netlist& nl) {
  if (!nl.finalized()) nl.finalize();
  const auto nnets = nl.num_nets();
  std::vector<char> live_net(nnets, 0);
  std::vector<char> live_cell(nl.cells().size(), 0);
  for (NetId p : nl.pos()) live_net[p] = 1;
  const auto& topo = nl.topo();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto& c = nl.cells()[*it];
    bool live = false;
    for (NetId o : c.out) live = live || live_net[o];
    if (!live) continue;
    live_cell[*it] = 1;
    for (NetId i : c.in) live_net[i] = 1;
  }
  std::vector<char> drop(nl.cells().size(), 0);
  std::vector<std::string> removed;
  for (std::size_t ci = 0; ci < nl.cells().size(); ++ci)
    if (!live_cell[ci]) {
      drop[ci] = 1;
      removed.push_back(nl.cells()[ci].name);
    }
  if (!removed.empty()) remove_cells(nl, drop);
  return removed;
}

void remove_cells(Netlist& nl, const std::vector<char>& drop) {
  const auto nnets = nl.num_nets();
  // Rebuild with compacted nets: keep PIs, POs and nets touched by kept cells.
  std::vector<char> keep(nnets, 0);
  for (NetId p : nl.pis()) keep[p] = 1;
  for (NetId p : nl.pos()) keep[p] = 1;
  for (const auto& s : nl.state()) keep[s.q] = keep[s.d] = 1;
  for (std::size_t ci = 0; ci < nl.cells().size(); ++ci) {
    if (drop[ci]) continue;
    for (NetId i : nl.cells()[ci].in) keep[i] = 1;
    for (NetId o : nl.cells()[ci].out) keep[o] = 1;
  }
  Netlist out;
  out.name = nl.name;
  std::vector<NetId> remap(nnets, ~NetId{0});
  for (NetId n = 0; n < nnets; ++n)
    if (keep[n]) remap[n] = out.add_net(nl.net_name(n));
  for (std::size_t ci = 0; ci < nl.cells().size(); ++ci) {
    if (drop[ci]) continue;
    Cell c = nl.cells()[ci];
    for (auto& i : c.in) i = remap[i];
    for (auto& o : c.out) o = remap[o];
    out.add_cell(std::move(c));
  }
  for (std::size_t i = 0; i < nl.pis().size(); ++i) out.add_pi(remap[nl.pis()[i]], i >= nl.num_input_bits());
  for (std::size_t j = 0; j < nl.pos().size(); ++j) out.add_po(remap[nl.pos()[j]], nl.po_names()[j]);
  for (const auto& f : nl.input_fields()) out.add_input_field(f);
  for (const auto& f : nl.output_fields()) out.add_output_field(f);
  for (auto s : nl.state()) {
    s.q = remap[s.q];
    s.d = remap[s.d];
    out.add_state_bit(std::move(s));
  }
  out.finalize();
  nl = std::move(out);
}

}  // namespace gifpo
