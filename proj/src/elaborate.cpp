#include "gifpo/elaborate.hpp"

#include "gifpo/error.hpp"

namespace gifpo {

std::string ElaboratedCircuit::provenance(std::uint32_t cell) const {
  int s = netlist.cells()[cell].source;
  if (s < 0 || static_cast<std::size_t>(s) >= source_gates.size()) return {};
  return source_gates[static_cast<std::size_t>(s)];
}

namespace {

std::string bit_name(const std::string& base, int width, int k) {
  return width == 1 ? base : base + "[" + std::to_string(k) + "]";
}

class Elaborator {
 public:
  explicit Elaborator(const Circuit& c) : c_(c) {}

  ElaboratedCircuit run() {
    e_.source_name = c_.name;
    e_.netlist.name = c_.name;
    e_.source_text = c_.source_lines;
    for (const auto& g : c_.gates) {
      e_.source_gates.push_back(g.instance);
      e_.source_lines.push_back(g.line);
    }
    bits_.assign(c_.nets.size(), {});
    Netlist& nl = e_.netlist;

    for (int in : c_.inputs) {
      InputField f{c_.nets[in].name, {}, false};
      for (auto n : make_bits(in)) f.bits.push_back(nl.add_pi(n));
      nl.add_input_field(std::move(f));
    }
    for (const auto& r : c_.registers) {
      InputField f{r.instance, {}, true};
      for (auto n : make_bits(r.q)) f.bits.push_back(nl.add_pi(n, true));
      nl.add_input_field(std::move(f));
    }
    // Nets produced by logic get their own bits; wiring kinds alias theirs.
    for (const auto& g : c_.gates)
      if (!is_wiring(g.kind)) make_bits(g.output);
    for (int gi : c_.topo_order) {
      const auto& g = c_.gates[static_cast<std::size_t>(gi)];
      if (is_wiring(g.kind)) bits_[g.output] = wire(g);
    }
    for (std::size_t gi = 0; gi < c_.gates.size(); ++gi) {
      src_ = static_cast<int>(gi);
      emit(c_.gates[gi]);
    }

    for (int out : c_.outputs) {
      OutputField f{c_.nets[out].name, {}};
      const int w = c_.width(out);
      for (int k = 0; k < w; ++k) f.bits.push_back(nl.add_po(bits_[out][k], bit_name(c_.nets[out].name, w, k)));
      nl.add_output_field(std::move(f));
    }
    for (const auto& r : c_.registers) {
      const int w = c_.width(r.q);
      OutputField f{r.instance + ".d", {}};
      for (int k = 0; k < w; ++k) {
        f.bits.push_back(nl.add_po(bits_[r.d][k], bit_name(r.instance + ".d", w, k)));
        nl.add_state_bit({bit_name(r.instance, w, k), bits_[r.q][k], bits_[r.d][k], ((r.init >> k) & 1u) != 0});
      }
      nl.add_output_field(std::move(f));
    }
    nl.finalize();
    for (NetId n = 0; n < nl.num_nets(); ++n)
      if (nl.driver(n) < 0 && !nl.is_pi(n))
        throw Error("undriven-net", "elaborated net '" + nl.net_name(n) + "' has no driver");
    return std::move(e_);
  }

 private:
  static bool is_wiring(GateKind k) {
    return k == GateKind::Shl || k == GateKind::Shr || k == GateKind::Slice || k == GateKind::Concat;
  }

  std::vector<NetId>& make_bits(int net) {
    auto& b = bits_[static_cast<std::size_t>(net)];
    const int w = c_.width(net);
    for (int k = 0; k < w; ++k) b.push_back(e_.netlist.add_net(bit_name(c_.nets[net].name, w, k)));
    return b;
  }

  NetId zero() {
    if (!zero_) {
      zero_ = e_.netlist.add_net("$const0");
      Cell c{CellKind::Const0, "$const0", {}, 0, {*zero_}, -1};
      e_.netlist.add_cell(std::move(c));
    }
    return *zero_;
  }

  std::vector<NetId> wire(const GateInstance& g) {
    const int w = c_.width(g.output);
    const auto& a = bits_[g.inputs[0].net];
    std::vector<NetId> out(static_cast<std::size_t>(w));
    switch (g.kind) {
      case GateKind::Shl:
        for (int k = 0; k < w; ++k) out[k] = k >= g.param ? a[k - g.param] : zero();
        break;
      case GateKind::Shr:
        for (int k = 0; k < w; ++k) out[k] = k + g.param < w ? a[k + g.param] : zero();
        break;
      case GateKind::Slice:
        for (int k = 0; k < w; ++k) out[k] = a[static_cast<std::size_t>(g.param + k)];
        break;
      default: {  // concat, first operand in the low bits
        std::size_t k = 0;
        for (const auto& op : g.inputs)
          for (NetId n : bits_[op.net]) out[k++] = n;
        break;
      }
    }
    return out;
  }

  NetId net(const std::string& n) { return e_.netlist.add_net(n); }

  void cell(CellKind kind, std::string name, std::vector<NetId> in, std::vector<NetId> out) {
    e_.netlist.add_cell(Cell{kind, std::move(name), std::move(in), 0, std::move(out), src_});
  }

  // Balanced tree of 2-input cells over `in`, pairing left to right; the root
  // drives `out`.
  void tree(CellKind kind, const std::string& prefix, std::vector<NetId> in, NetId out) {
    if (in.size() == 1) {
      cell(CellKind::Buf, prefix, {in[0]}, {out});
      return;
    }
    int t = 0;
    while (in.size() > 2) {
      std::vector<NetId> next;
      for (std::size_t i = 0; i < in.size(); i += 2) {
        if (i + 1 == in.size()) {
          next.push_back(in[i]);
          continue;
        }
        std::string nm = prefix + "/t" + std::to_string(t++);
        NetId o = net(nm);
        cell(kind, nm, {in[i], in[i + 1]}, {o});
        next.push_back(o);
      }
      in = std::move(next);
    }
    cell(kind, prefix, {in[0], in[1]}, {out});
  }

  static CellKind bitwise_cell(GateKind k) {
    switch (k) {
      case GateKind::And:
      case GateKind::RAnd:
        return CellKind::And;
      case GateKind::Or:
      case GateKind::ROr:
        return CellKind::Or;
      default:
        return CellKind::Xor;
    }
  }

  void emit(const GateInstance& g) {
    const auto& out = bits_[g.output];
    const int w = c_.width(g.output);
    auto in = [&](std::size_t i) -> const std::vector<NetId>& { return bits_[g.inputs[i].net]; };
    auto per_bit = [&](int k) { return w == 1 ? g.instance : g.instance + "/" + std::to_string(k); };
    switch (g.kind) {
      case GateKind::Shl:
      case GateKind::Shr:
      case GateKind::Slice:
      case GateKind::Concat:
        return;
      case GateKind::Const:
        for (int k = 0; k < w; ++k)
          cell(((g.literal >> k) & 1u) ? CellKind::Const1 : CellKind::Const0, bit_name(c_.nets[g.output].name, w, k),
               {}, {out[k]});
        return;
      case GateKind::Not:
        for (int k = 0; k < w; ++k) cell(CellKind::Inv, per_bit(k), {in(0)[k]}, {out[k]});
        return;
      case GateKind::Assign:
        for (int k = 0; k < w; ++k) cell(CellKind::Buf, per_bit(k), {in(0)[k]}, {out[k]});
        return;
      case GateKind::And:
      case GateKind::Or:
      case GateKind::Xor:
        for (int k = 0; k < w; ++k) {
          std::vector<NetId> ops;
          for (std::size_t i = 0; i < g.inputs.size(); ++i) {
            NetId n = in(i)[k];
            if (g.inputs[i].inverted) {
              std::string nm = per_bit(k) + "/n" + std::to_string(i);
              NetId inv = net(nm);
              cell(CellKind::Inv, nm, {n}, {inv});
              n = inv;
            }
            ops.push_back(n);
          }
          tree(bitwise_cell(g.kind), per_bit(k), ops, out[k]);
        }
        return;
      case GateKind::RAnd:
      case GateKind::ROr:
      case GateKind::RXor:
        tree(bitwise_cell(g.kind), g.instance, in(0), out[0]);
        return;
      case GateKind::Mux2:
        for (int k = 0; k < w; ++k) cell(CellKind::Mux2, per_bit(k), {in(0)[0], in(1)[k], in(2)[k]}, {out[k]});
        return;
      case GateKind::Eq: {
        const auto& a = in(0);
        const auto& b = in(1);
        const std::size_t n = a.size();
        std::vector<NetId> eqs;
        for (std::size_t k = 0; k < n; ++k) {
          std::string base = g.instance + "/" + std::to_string(k);
          NetId x = net(base + "/x");
          cell(CellKind::Xor, base + "/x", {a[k], b[k]}, {x});
          NetId e = n == 1 ? out[0] : net(base + "/e");
          cell(CellKind::Inv, n == 1 ? g.instance : base + "/e", {x}, {e});
          eqs.push_back(e);
        }
        if (n > 1) tree(CellKind::And, g.instance, eqs, out[0]);
        return;
      }
      case GateKind::Lt: {
        // borrow' = (~a & b) | (~(a ^ b) & borrow); the final borrow is a < b.
        const auto& a = in(0);
        const auto& b = in(1);
        const std::size_t n = a.size();
        NetId borrow = 0;
        for (std::size_t k = 0; k < n; ++k) {
          std::string base = g.instance + "/" + std::to_string(k);
          const bool last = k + 1 == n;
          NetId na = net(base + "/na");
          cell(CellKind::Inv, base + "/na", {a[k]}, {na});
          NetId gen = (k == 0 && last) ? out[0] : net(base + "/g");
          cell(CellKind::And, (k == 0 && last) ? g.instance : base + "/g", {na, b[k]}, {gen});
          if (k == 0) {
            borrow = gen;
            continue;
          }
          NetId x = net(base + "/x");
          cell(CellKind::Xor, base + "/x", {a[k], b[k]}, {x});
          NetId nx = net(base + "/nx");
          cell(CellKind::Inv, base + "/nx", {x}, {nx});
          NetId p = net(base + "/p");
          cell(CellKind::And, base + "/p", {nx, borrow}, {p});
          NetId nb = last ? out[0] : net(base + "/b");
          cell(CellKind::Or, last ? g.instance : base + "/b", {gen, p}, {nb});
          borrow = nb;
        }
        return;
      }
      case GateKind::Add:
        adder(g.instance, in(0), in(1), std::nullopt, out, std::nullopt);
        return;
      case GateKind::Sub: {
        std::vector<NetId> nb;
        for (int k = 0; k < w; ++k) {
          std::string nm = g.instance + "/nb" + std::to_string(k);
          NetId n = net(nm);
          cell(CellKind::Inv, nm, {in(1)[k]}, {n});
          nb.push_back(n);
        }
        NetId one = net(g.instance + "/one");
        cell(CellKind::Const1, g.instance + "/one", {}, {one});
        adder(g.instance, in(0), nb, one, out, std::nullopt);
        return;
      }
      case GateKind::Mul:
        multiplier(g, in(0), in(1), out);
        return;
    }
  }

  // Ripple adder a + b (+ cin). Bit 0 is an HA unless a carry-in is given.
  // `carry_out`, when set, receives the final carry; otherwise it is left on
  // an internal net with no reader.
  void adder(const std::string& prefix, const std::vector<NetId>& a, const std::vector<NetId>& b,
             std::optional<NetId> cin, const std::vector<NetId>& sum, std::optional<NetId> carry_out) {
    const std::size_t n = a.size();
    std::optional<NetId> carry = cin;
    for (std::size_t k = 0; k < n; ++k) {
      const bool last = k + 1 == n;
      NetId co = (last && carry_out) ? *carry_out : net(prefix + "/c" + std::to_string(k + 1));
      if (!carry) {
        cell(CellKind::Ha, prefix + "/ha" + std::to_string(k), {a[k], b[k]}, {sum[k], co});
      } else {
        cell(CellKind::Fa, prefix + "/fa" + std::to_string(k), {*carry, a[k], b[k]}, {sum[k], co});
      }
      carry = co;
    }
  }

  // Array multiplier: pp[i][j] = a[j] & b[i]; row r adds pp[r] to the
  // shifted running sum of the rows above it.
  void multiplier(const GateInstance& g, const std::vector<NetId>& a, const std::vector<NetId>& b,
                  const std::vector<NetId>& p) {
    const std::size_t n = a.size();
    std::vector<std::vector<NetId>> pp(n, std::vector<NetId>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::string nm = g.instance + "/pp" + std::to_string(i) + "_" + std::to_string(j);
        pp[i][j] = (i == 0 && j == 0) ? p[0] : net(nm);
        cell(CellKind::And, nm, {a[j], b[i]}, {pp[i][j]});
      }
    if (n == 1) {
      cell(CellKind::Const0, g.instance + "/zero", {}, {p[1]});
      return;
    }
    NetId z = net(g.instance + "/zero");
    cell(CellKind::Const0, g.instance + "/zero", {}, {z});
    std::vector<NetId> acc(pp[0].begin() + 1, pp[0].end());  // upper bits of the running sum
    acc.push_back(z);
    for (std::size_t r = 1; r < n; ++r) {
      const bool last = r + 1 == n;
      std::string prefix = g.instance + "/r" + std::to_string(r);
      std::vector<NetId> s(n);
      s[0] = p[r];
      for (std::size_t k = 1; k < n; ++k) s[k] = last ? p[r + k] : net(prefix + "/s" + std::to_string(k));
      NetId co = last ? p[2 * n - 1] : net(prefix + "/c" + std::to_string(n));
      adder(prefix, pp[r], acc, std::nullopt, s, co);
      acc.assign(s.begin() + 1, s.end());
      acc.push_back(co);
    }
  }

  const Circuit& c_;
  ElaboratedCircuit e_;
  std::vector<std::vector<NetId>> bits_;
  std::optional<NetId> zero_;
  int src_ = -1;
};

}  // namespace

ElaboratedCircuit elaborate(const Circuit& c) { return Elaborator(c).run(); }

std::optional<std::uint64_t> check_elaboration(const Circuit& c, const ElaboratedCircuit& e) {
  const Netlist& nl = e.netlist;
  const int total = c.input_bits() + c.state_bits();
  if (total > 20) throw Error("too-wide", "exhaustive elaboration check limited to 20 bits");
  const auto pos = pi_index_positions(nl);
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << total); ++idx) {
    auto bits = pi_bits_from_index(nl, idx);
    std::vector<std::uint64_t> in, st;
    for (const auto& f : nl.input_fields()) {
      std::uint64_t v = 0;
      for (std::size_t k = 0; k < f.bits.size(); ++k) v |= std::uint64_t{bits[f.bits[k]]} << k;
      (f.is_state ? st : in).push_back(v);
    }
    auto wf = evaluate_words(c, in, st);
    auto fv = evaluate_frame(nl, bits);
    std::size_t fi = 0;
    for (int o : c.outputs) {
      const auto& f = nl.output_fields()[fi++];
      for (std::size_t k = 0; k < f.bits.size(); ++k)
        if (fv.po[f.bits[k]] != ((wf.values[static_cast<std::size_t>(o)] >> k) & 1u)) return idx;
    }
    for (std::size_t r = 0; r < c.registers.size(); ++r) {
      const auto& f = nl.output_fields()[fi++];
      for (std::size_t k = 0; k < f.bits.size(); ++k)
        if (fv.po[f.bits[k]] != ((wf.next_state[r] >> k) & 1u)) return idx;
    }
  }
  (void)pos;
  return std::nullopt;
}

}  // namespace gifpo
