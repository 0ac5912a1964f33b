#include "gifpo/stuckat.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <map>
#include <sstream>
#include <thread>

#include "gifpo/error.hpp"
#include "gifpo/gif.hpp"
#include "text.hpp"

namespace gifpo {

std::string_view fault_status_name(FaultStatus s) {
  switch (s) {
    case FaultStatus::Undetected: return "undetected";
    case FaultStatus::Detected: return "detected";
    case FaultStatus::Untestable: return "untestable";
  }
  return "?";
}

std::string fault_name(const Netlist& n, const StuckAtFault& f) {
  return n.net_name(f.net) + (f.value ? "-1" : "-0");
}

std::vector<StuckAtFault> enumerate_stuckat(const Netlist& n) {
  std::vector<StuckAtFault> out;
  out.reserve(2 * n.num_nets());
  for (NetId i = 0; i < n.num_nets(); ++i) {
    out.push_back({i, false});
    out.push_back({i, true});
  }
  return out;
}

std::size_t FaultSimResult::detected() const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), FaultStatus::Detected));
}

std::size_t FaultSimResult::untestable() const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), FaultStatus::Untestable));
}

std::vector<std::uint64_t> FaultSimResult::curve() const {
  std::vector<std::uint64_t> c(cycles, 0);
  for (auto t : first_cycle)
    if (t >= 0 && static_cast<std::size_t>(t) < cycles) ++c[static_cast<std::size_t>(t)];
  for (std::size_t t = 1; t < c.size(); ++t) c[t] += c[t - 1];
  return c;
}

std::vector<std::size_t> FaultSimResult::detected_in(std::size_t t) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < first_cycle.size(); ++i)
    if (first_cycle[i] == static_cast<std::int64_t>(t)) out.push_back(i);
  return out;
}

double FaultSimResult::percent() const {
  const std::size_t denom = faults.size() - untestable();
  return denom == 0 ? 100.0 : 100.0 * static_cast<double>(detected()) / static_cast<double>(denom);
}

namespace {

// Serial cone forcing per net; one propagation serves both polarities since
// only lanes where the good value differs from the stuck value matter.
void run_faults(const Netlist& nl, const FrameSet& frames, const EngineOptions& opt, FaultSimResult* res,
                std::vector<BitRow>* rows) {
  if (frames.num_pis != nl.pis().size()) throw Error("width-mismatch", "frame width does not match PI count");
  const GoodValues good = simulate_good(nl, frames);
  const std::size_t blocks = frames.blocks();
  const auto lanes = static_cast<std::size_t>(frames.lanes);
  const std::size_t nnets = nl.num_nets();
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    ConeSimulator cone(nl);
    for (std::size_t n = next++; n < nnets; n = next++) {
      const auto net = static_cast<NetId>(n);
      cone.set_site(net);
      if (cone.reachable_pos().empty()) continue;
      bool done[2] = {false, false};
      for (std::size_t b = 0; b < blocks && (rows || !(done[0] && done[1])); ++b) {
        const std::uint64_t* g = good.block(b);
        const std::uint64_t lm = frames.lane_mask(b);
        cone.propagate(g);
        const std::uint64_t obs = cone.any_diff() & lm;
        if (!obs) continue;
        for (int v = 0; v < 2; ++v) {
          const std::uint64_t det = obs & (v ? ~g[net] : g[net]);
          if (!det) continue;
          const std::size_t fi = 2 * n + static_cast<std::size_t>(v);
          if (rows) {
            auto& r = (*rows)[fi];
            if (lanes == 64) {
              if (r.size() <= b) r.resize(blocks, 0);
              r[b] = det;
            } else {
              for (std::uint64_t d = det; d; d &= d - 1)
                bit_set(r, b * lanes + static_cast<std::size_t>(std::countr_zero(d)));
            }
          }
          if (res && !done[v]) {
            res->first_cycle[fi] = static_cast<std::int64_t>(b * lanes + static_cast<std::size_t>(std::countr_zero(det)));
            res->status[fi] = FaultStatus::Detected;
            done[v] = true;
          }
        }
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(nnets)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
}

}  // namespace

FaultSimResult fault_simulate(const Netlist& nl, const FrameSet& frames, const EngineOptions& opt) {
  FaultSimResult r;
  r.faults = enumerate_stuckat(nl);
  r.status.assign(r.faults.size(), FaultStatus::Undetected);
  r.first_cycle.assign(r.faults.size(), -1);
  r.cycles = frames.frames;
  run_faults(nl, frames, opt, &r, nullptr);
  return r;
}

FaultSimResult fault_simulate(const Netlist& nl, const Stimulus& st, const EngineOptions& opt) {
  return fault_simulate(nl, bind_stimulus(nl, st, opt.lanes), opt);
}

std::vector<BitRow> fault_rows(const Netlist& nl, const FrameSet& frames, const EngineOptions& opt) {
  std::vector<BitRow> rows(2 * nl.num_nets());
  run_faults(nl, frames, opt, nullptr, &rows);
  return rows;
}

FaultSimResult exhaustive_fault_simulate(const Netlist& nl, const EngineOptions& opt) {
  auto r = fault_simulate(nl, FrameSet::exhaustive(nl, opt.lanes), opt);
  for (auto& s : r.status)
    if (s == FaultStatus::Undetected) s = FaultStatus::Untestable;
  return r;
}

std::string Counterexample::describe(const Netlist& n) const {
  std::string s = "index " + std::to_string(index) + " (";
  bool first = true;
  for (const auto& f : n.input_fields()) {
    std::uint64_t v = 0;
    for (std::size_t k = 0; k < f.bits.size(); ++k) v |= std::uint64_t{pi_bits[f.bits[k]]} << k;
    s += (first ? "" : ", ") + f.name + "=0x" + text::to_hex(v);
    first = false;
  }
  s += ") differs at";
  for (const auto& p : differing_pos) s += " " + p;
  return s;
}

std::optional<Counterexample> exhaustive_equivalence(const Netlist& a, const Netlist& b) {
  if (a.pis().size() != b.pis().size() || a.pos().size() != b.pos().size() ||
      a.num_state_bits() != b.num_state_bits())
    throw Error("signature", "netlists have different PI/PO signatures");
  if (a.pis().size() > 20) throw Error("too-wide", "exhaustive equivalence limited to 20 PI bits");
  const FrameSet fs = FrameSet::exhaustive(a);
  const GoodValues ga = simulate_good(a, fs);
  const GoodValues gb = simulate_good(b, fs);
  for (std::size_t blk = 0; blk < fs.blocks(); ++blk) {
    std::uint64_t diff = 0;
    for (std::size_t j = 0; j < a.pos().size(); ++j)
      diff |= ga.block(blk)[a.pos()[j]] ^ gb.block(blk)[b.pos()[j]];
    diff &= fs.lane_mask(blk);
    if (!diff) continue;
    const int lane = std::countr_zero(diff);
    Counterexample cx;
    const std::size_t t = blk * static_cast<std::size_t>(fs.lanes) + static_cast<std::size_t>(lane);
    cx.pi_bits = fs.frame(t);
    auto pos = pi_index_positions(a);
    for (std::size_t i = 0; i < pos.size(); ++i) cx.index |= std::uint64_t{cx.pi_bits[i]} << pos[i];
    for (std::size_t j = 0; j < a.pos().size(); ++j)
      if (((ga.block(blk)[a.pos()[j]] ^ gb.block(blk)[b.pos()[j]]) >> lane) & 1u) cx.differing_pos.push_back(a.po_names()[j]);
    return cx;
  }
  return std::nullopt;
}

namespace {

Netlist tie_nets(const Netlist& nl, std::span<const StuckAtFault> ties) {
  Netlist out = nl;
  auto& cells = out.mutable_cells();
  std::vector<int> tie(nl.num_nets(), -1);
  for (const auto& f : ties) tie[f.net] = f.value ? 1 : 0;
  std::vector<std::pair<NetId, NetId>> pi_redirect;
  for (NetId n = 0; n < nl.num_nets(); ++n) {
    if (tie[n] < 0) continue;
    const CellKind k = tie[n] ? CellKind::Const1 : CellKind::Const0;
    const int d = nl.driver(n);
    if (d >= 0) {
      auto& c = cells[static_cast<std::size_t>(d)];
      c = Cell{k, c.name, {}, 0, {n}, c.source};
    } else {
      NetId t = out.add_net(nl.net_name(n) + "$tie");
      out.add_cell(Cell{k, nl.net_name(n) + "$tie", {}, 0, {t}, -1});
      pi_redirect.emplace_back(n, t);
    }
  }
  if (!pi_redirect.empty()) {
    // A tied PI keeps its port; its readers move to the constant. A PO that
    // aliases the PI becomes a constant output.
    Netlist re;
    re.name = out.name;
    for (NetId n = 0; n < out.num_nets(); ++n) re.add_net(out.net_name(n));
    auto map = [&](NetId n) {
      for (auto [from, to] : pi_redirect)
        if (from == n) return to;
      return n;
    };
    for (auto c : out.cells()) {
      for (auto& i : c.in) i = map(i);
      re.add_cell(std::move(c));
    }
    for (std::size_t i = 0; i < out.pis().size(); ++i) re.add_pi(out.pis()[i], i >= out.num_input_bits());
    for (std::size_t j = 0; j < out.pos().size(); ++j) re.add_po(map(out.pos()[j]), out.po_names()[j]);
    for (const auto& f : out.input_fields()) re.add_input_field(f);
    for (const auto& f : out.output_fields()) re.add_output_field(f);
    for (auto s : out.state()) {
      s.d = map(s.d);
      re.add_state_bit(s);
    }
    out = std::move(re);
  }
  out.finalize();
  out = propagate_constants(out);
  sweep_dead_cells(out);
  return out;
}

bool is_const_net(const Netlist& n, NetId net) {
  const int d = n.driver(net);
  if (d < 0) return false;
  const auto k = n.cells()[static_cast<std::size_t>(d)].kind;
  return k == CellKind::Const0 || k == CellKind::Const1;
}

}  // namespace

Netlist remove_redundant(const Netlist& nl, std::span<const StuckAtFault> ties) {
  if (ties.empty()) return nl;
  Netlist out = tie_nets(nl, ties);
  if (auto cx = exhaustive_equivalence(nl, out))
    throw Error("equivalence", "constant tie changes the function: " + cx->describe(nl));
  return out;
}

RedundancyRemoval remove_all_redundancy(const Netlist& nl) {
  RedundancyRemoval r{nl, {}, 0};
  for (;;) {
    const auto fs = exhaustive_fault_simulate(r.netlist);
    std::vector<StuckAtFault> cand;
    for (std::size_t i = 0; i < fs.faults.size(); ++i) {
      if (fs.status[i] != FaultStatus::Untestable) continue;
      const auto& f = fs.faults[i];
      if (is_const_net(r.netlist, f.net)) continue;
      if (r.netlist.is_pi(f.net) && r.netlist.fanout(f.net).empty()) continue;
      if (!cand.empty() && cand.back().net == f.net) continue;  // both polarities: keep the 0 tie
      cand.push_back(f);
    }
    if (cand.empty()) break;
    ++r.rounds;
    Netlist next = tie_nets(r.netlist, cand);
    if (!exhaustive_equivalence(r.netlist, next)) {
      for (const auto& f : cand) r.tied.push_back(fault_name(r.netlist, f));
      r.netlist = std::move(next);
      continue;
    }
    // Ties interact; apply the first one alone (always safe on its own).
    std::span<const StuckAtFault> one(cand.data(), 1);
    r.tied.push_back(fault_name(r.netlist, cand[0]));
    r.netlist = remove_redundant(r.netlist, one);
  }
  return r;
}

// ---- gate-level GNL --------------------------------------------------------

namespace {

// Splits "x[3]" into ("x", 3).
bool split_indexed(const std::string& s, std::string& base, int& index) {
  if (s.size() < 4 || s.back() != ']') return false;
  auto open = s.rfind('[');
  if (open == std::string::npos || open == 0) return false;
  const auto digits = s.substr(open + 1, s.size() - open - 2);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    return false;
  base = s.substr(0, open);
  index = std::stoi(digits);
  return true;
}

// Groups names into fields by their `base[k]` spelling, first appearance
// order, bits ordered by k. Returns (field name, member positions).
std::vector<std::pair<std::string, std::vector<std::size_t>>> group_fields(const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, std::vector<std::pair<int, std::size_t>>>> groups;
  std::map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string base = names[i];
    int k = 0;
    if (!split_indexed(names[i], base, k)) base = names[i];
    auto it = where.find(base);
    if (it == where.end()) {
      where[base] = groups.size();
      groups.push_back({base, {{k, i}}});
    } else {
      groups[it->second].second.push_back({k, i});
    }
  }
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  for (auto& [base, members] : groups) {
    std::sort(members.begin(), members.end());
    std::vector<std::size_t> pos;
    for (auto [k, i] : members) pos.push_back(i);
    out.push_back({base, pos});
  }
  return out;
}

}  // namespace

Netlist gate_netlist_from_circuit(const Circuit& c) {
  Netlist nl;
  nl.name = c.name;
  for (const auto& n : c.nets) {
    if (n.width != 1) throw Error("width-mismatch", "gate-level net '" + n.name + "' must be 1 bit");
    nl.add_net(n.name);
  }
  auto id = [](int n) { return static_cast<NetId>(n); };
  std::vector<std::string> in_names;
  for (int i : c.inputs) {
    nl.add_pi(id(i));
    in_names.push_back(c.nets[static_cast<std::size_t>(i)].name);
  }
  for (auto& [name, pos] : group_fields(in_names)) {
    InputField f{name, {}, false};
    for (auto p : pos) f.bits.push_back(static_cast<std::uint32_t>(p));
    nl.add_input_field(std::move(f));
  }
  std::vector<std::string> reg_names;
  for (const auto& r : c.registers) {
    nl.add_pi(id(r.q), true);
    reg_names.push_back(r.instance);
  }
  for (auto& [name, pos] : group_fields(reg_names)) {
    InputField f{name, {}, true};
    for (auto p : pos) f.bits.push_back(static_cast<std::uint32_t>(c.inputs.size() + p));
    nl.add_input_field(std::move(f));
  }
  std::vector<std::string> out_names;
  for (int o : c.outputs) {
    nl.add_po(id(o), c.nets[static_cast<std::size_t>(o)].name);
    out_names.push_back(c.nets[static_cast<std::size_t>(o)].name);
  }
  for (auto& [name, pos] : group_fields(out_names)) {
    OutputField f{name, {}};
    for (auto p : pos) f.bits.push_back(static_cast<std::uint32_t>(p));
    nl.add_output_field(std::move(f));
  }
  std::vector<std::string> d_names;
  for (const auto& r : c.registers) {
    nl.add_po(id(r.d), r.instance + ".d");
    nl.add_state_bit({r.instance, id(r.q), id(r.d), (r.init & 1u) != 0});
    d_names.push_back(r.instance + ".d");
  }
  for (auto& [name, pos] : group_fields(d_names)) {
    OutputField f{name, {}};
    for (auto p : pos) f.bits.push_back(static_cast<std::uint32_t>(c.outputs.size() + p));
    nl.add_output_field(std::move(f));
  }
  for (const auto& g : c.gates) {
    Cell cell;
    cell.name = g.instance;
    cell.out = {id(g.output)};
    for (std::size_t i = 0; i < g.inputs.size(); ++i) {
      cell.in.push_back(id(g.inputs[i].net));
      if (g.inputs[i].inverted) cell.inv |= 1u << i;
    }
    switch (g.kind) {
      case GateKind::Const: cell.kind = (g.literal & 1u) ? CellKind::Const1 : CellKind::Const0; break;
      case GateKind::Not: cell.kind = CellKind::Inv; break;
      case GateKind::Assign: cell.kind = CellKind::Buf; break;
      case GateKind::And: cell.kind = CellKind::And; break;
      case GateKind::Or: cell.kind = CellKind::Or; break;
      case GateKind::Xor: cell.kind = CellKind::Xor; break;
      default:
        throw Error("unknown-kind", "gate '" + g.instance + "' of kind '" + std::string(kind_name(g.kind)) +
                                        "' is not a gate-level primitive");
    }
    nl.add_cell(std::move(cell));
  }
  nl.finalize();
  return nl;
}

std::string print_gate_netlist(const Netlist& nl) {
  if (!nl.is_gate_level()) throw Error("unknown-kind", "netlist contains non-primitive cells");
  std::ostringstream os;
  os << "circuit " << nl.name << "\n";
  std::vector<char> is_out(nl.num_nets(), 0);
  // Register d bits are the last POs, one per state bit.
  const std::size_t port_pos = nl.pos().size() - nl.state().size();
  for (std::size_t j = 0; j < port_pos; ++j) is_out[nl.pos()[j]] = 1;
  for (NetId n = 0; n < nl.num_nets(); ++n) {
    const int d = nl.driver(n);
    const auto& name = nl.net_name(n);
    if (nl.is_pi(n) && nl.pi_index(n) < static_cast<int>(nl.num_input_bits())) {
      os << "input " << name << " 1\n";
    } else if (is_out[n]) {
      os << "output " << name << " 1\n";
    } else if (d >= 0 && (nl.cells()[static_cast<std::size_t>(d)].kind == CellKind::Const0 ||
                          nl.cells()[static_cast<std::size_t>(d)].kind == CellKind::Const1)) {
      os << "const " << name << " 1 0x" << (nl.cells()[static_cast<std::size_t>(d)].kind == CellKind::Const1 ? 1 : 0)
         << "\n";
    } else {
      os << "wire " << name << " 1\n";
    }
  }
  for (const auto& s : nl.state()) {
    os << "dff " << s.name << " " << nl.net_name(s.q) << " " << nl.net_name(s.d);
    if (s.init) os << " init=0x1";
    os << "\n";
  }
  for (const auto& c : nl.cells()) {
    std::string kind;
    switch (c.kind) {
      case CellKind::Const0:
      case CellKind::Const1:
        if (is_out[c.out[0]]) {
          os << "gate assign " << c.name << "$c " << nl.net_name(c.out[0]) << " "
             << (c.kind == CellKind::Const1 ? "$one" : "$zero") << "\n";
        }
        continue;
      case CellKind::Buf: kind = "assign"; break;
      case CellKind::Inv: kind = "not"; break;
      case CellKind::And: kind = "and"; break;
      case CellKind::Or: kind = "or"; break;
      case CellKind::Xor: kind = "xor"; break;
      default: break;
    }
    os << "gate " << kind << " " << c.name << " " << nl.net_name(c.out[0]);
    for (std::size_t i = 0; i < c.in.size(); ++i)
      os << " " << (((c.inv >> i) & 1u) ? "~" : "") << nl.net_name(c.in[i]);
    os << "\n";
  }
  os << "end\n";
  std::string s = os.str();
  // Constant outputs read shared constant nets declared up front.
  const bool zero = s.find(" $zero\n") != std::string::npos, one = s.find(" $one\n") != std::string::npos;
  if (zero || one) {
    auto at = s.find('\n') + 1;
    std::string decl = std::string(zero ? "const $zero 1 0x0\n" : "") + (one ? "const $one 1 0x1\n" : "");
    s.insert(at, decl);
  }
  return s;
}

}  // namespace gifpo
