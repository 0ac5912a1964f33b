#include "gifpo/gif.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <sstream>

#include "gifpo/error.hpp"
#include "text.hpp"

namespace gifpo {

std::vector<GifClassTemplate> enumerate_gifs(CellKind kind, int arity) {
  std::vector<GifClassTemplate> out;
  const int outputs = cell_output_count(kind);
  const std::uint32_t nm = 1u << arity;
  for (int o = 0; o < outputs; ++o) {
    for (std::uint32_t m = 0; m < nm; ++m) {
      const std::uint32_t good = (eval_cell_local(kind, arity, m) >> o) & 1u;
      std::uint32_t members = 0;
      for (int p = 0; p < arity; ++p) {
        std::uint32_t flipped = m ^ (1u << (arity - 1 - p));
        if (((eval_cell_local(kind, arity, flipped) >> o) & 1u) != good) members |= 1u << p;
      }
      if (members) out.push_back({o, m, good != 0, members});
    }
  }
  return out;
}

std::vector<GifFault> enumerate_gif_faults(CellKind kind, int arity) {
  std::vector<GifFault> out;
  for (const auto& t : enumerate_gifs(kind, arity))
    for (int p = 0; p < arity; ++p)
      if ((t.members >> p) & 1u) out.push_back({p, t.go, t.minterm, t.alpha});
  return out;
}

std::string pin_letter(CellKind kind, int pin) {
  if (kind == CellKind::Fa && pin == 0) return "C";
  return cell_input_pins(kind, pin + 1)[static_cast<std::size_t>(pin)];
}

std::vector<std::string> gif_labels(CellKind kind, int arity) {
  std::vector<std::string> labels;
  std::vector<int> counter(static_cast<std::size_t>(arity), 0);
  for (const auto& t : enumerate_gifs(kind, arity)) {
    std::vector<std::string> parts;
    for (int p = 0; p < arity; ++p)
      if ((t.members >> p) & 1u) parts.push_back(pin_letter(kind, p) + std::to_string(++counter[p]));
    std::sort(parts.begin(), parts.end());
    std::string s;
    for (const auto& x : parts) s += (s.empty() ? "" : ", ") + x;
    labels.push_back(s);
  }
  return labels;
}

std::string minterm_string(std::uint32_t minterm, int arity) {
  std::string s;
  for (int p = 0; p < arity; ++p) s += ((minterm >> (arity - 1 - p)) & 1u) ? '1' : '0';
  return s;
}

std::string_view point_status_name(PointStatus s) {
  switch (s) {
    case PointStatus::Open: return "open";
    case PointStatus::UnreachableAuto: return "unreachable-auto";
    case PointStatus::UnreachableFpd: return "unreachable-fpd";
  }
  return "?";
}

namespace {

int class_count(const Cell& c) {
  return static_cast<int>(enumerate_gifs(c.kind, static_cast<int>(c.in.size())).size());
}

int class_count(const std::vector<Cell>& cells) {
  int n = 0;
  for (const auto& c : cells) n += class_count(c);
  return n;
}

// Rewrites one cell whose inputs include constants into cells without
// constant inputs (or constant drivers). `cv` holds known net constants.
class ConstFolder {
 public:
  ConstFolder(Netlist& nl, std::vector<int>& cv) : nl_(nl), cv_(cv) {}

  std::vector<Cell> fold(const Cell& c, std::string& action) {
    out_.clear();
    cell_ = &c;
    extra_ = 0;
    std::vector<NetId> var;   // non-constant inputs, pin order
    std::vector<int> konst;   // constant value per pin, -1 if variable
    for (std::size_t p = 0; p < c.in.size(); ++p) {
      int v = cv_[c.in[p]];
      if (v >= 0 && ((c.inv >> p) & 1u)) v ^= 1;
      konst.push_back(v);
      if (v < 0) var.push_back(c.in[p]);
    }
    auto var_inv = [&]() {
      std::uint32_t inv = 0;
      int k = 0;
      for (std::size_t p = 0; p < c.in.size(); ++p)
        if (konst[p] < 0) inv |= ((c.inv >> p) & 1u) << k++;
      return inv;
    };
    const NetId y = c.out[0];
    switch (c.kind) {
      case CellKind::Buf:
        set_const(y, konst[0]);
        action = "BUF of constant";
        break;
      case CellKind::Inv:
        set_const(y, konst[0] ^ 1);
        action = "INV of constant";
        break;
      case CellKind::And:
      case CellKind::Or: {
        const int dom = c.kind == CellKind::And ? 0 : 1;
        if (std::find(konst.begin(), konst.end(), dom) != konst.end()) {
          set_const(y, dom);
          action = std::string(cell_kind_name(c.kind)) + " with controlling constant";
        } else if (var.empty()) {
          set_const(y, dom ^ 1);
          action = std::string(cell_kind_name(c.kind)) + " of constants";
        } else if (var.size() == 1) {
          emit({var_inv() ? CellKind::Inv : CellKind::Buf, c.name, {var[0]}, 0, {y}, c.source});
          action = std::string(cell_kind_name(c.kind)) + " reduced to single input";
        } else {
          emit({c.kind, c.name, var, var_inv(), {y}, c.source});
          action = std::string(cell_kind_name(c.kind)) + " lost constant input";
        }
        break;
      }
      case CellKind::Xor: {
        int parity = 0;
        for (int v : konst)
          if (v > 0) parity ^= 1;
        parity ^= std::popcount(var_inv()) & 1;
        if (var.empty()) {
          set_const(y, parity);
        } else if (var.size() == 1) {
          emit({parity ? CellKind::Inv : CellKind::Buf, c.name, {var[0]}, 0, {y}, c.source});
        } else if (!parity) {
          emit({CellKind::Xor, c.name, var, 0, {y}, c.source});
        } else {
          NetId t = fresh("x");
          emit({CellKind::Xor, c.name, var, 0, {t}, c.source});
          emit({CellKind::Inv, c.name + "/inv", {t}, 0, {y}, c.source});
        }
        action = "XOR lost constant input";
        break;
      }
      case CellKind::Mux2: {
        const NetId s = c.in[0], a = c.in[1], b = c.in[2];
        if (konst[0] >= 0) {
          const int pick = konst[0] ? 2 : 1;
          if (konst[static_cast<std::size_t>(pick)] >= 0)
            set_const(y, konst[static_cast<std::size_t>(pick)]);
          else
            emit({CellKind::Buf, c.name, {c.in[static_cast<std::size_t>(pick)]}, 0, {y}, c.source});
          action = "MUX2 with constant select";
        } else if (konst[1] >= 0 && konst[2] >= 0) {
          if (konst[1] == konst[2])
            set_const(y, konst[1]);
          else
            emit({konst[2] ? CellKind::Buf : CellKind::Inv, c.name, {s}, 0, {y}, c.source});
          action = "MUX2 with constant data";
        } else if (konst[1] >= 0) {
          if (konst[1] == 0) {
            emit({CellKind::And, c.name, {s, b}, 0, {y}, c.source});
          } else {
            NetId ns = fresh("ns");
            emit({CellKind::Inv, c.name + "/ns", {s}, 0, {ns}, c.source});
            emit({CellKind::Or, c.name, {ns, b}, 0, {y}, c.source});
          }
          action = "MUX2 with constant A";
        } else {
          if (konst[2] == 0) {
            NetId ns = fresh("ns");
            emit({CellKind::Inv, c.name + "/ns", {s}, 0, {ns}, c.source});
            emit({CellKind::And, c.name, {ns, a}, 0, {y}, c.source});
          } else {
            emit({CellKind::Or, c.name, {s, a}, 0, {y}, c.source});
          }
          action = "MUX2 with constant B";
        }
        break;
      }
      case CellKind::Ha:
      case CellKind::Fa: {
        int ones = 0;
        for (int v : konst)
          if (v > 0) ++ones;
        const NetId so = c.out[0], co = c.out[1];
        const std::string kname(cell_kind_name(c.kind));
        if (var.empty()) {
          set_const(so, ones & 1);
          set_const(co, ones >= 2);
          action = kname + " of constants";
        } else if (var.size() == 1) {
          // One variable x: S = x ^ parity, CO = x when exactly one other
          // input is 1 (and constant otherwise).
          const int nconst = static_cast<int>(c.in.size()) - 1;
          emit({(ones & 1) ? CellKind::Inv : CellKind::Buf, c.name, {var[0]}, 0, {so}, c.source});
          if (nconst == 1) {
            if (ones) emit({CellKind::Buf, c.name + "/co", {var[0]}, 0, {co}, c.source});
            else set_const(co, 0);
          } else {
            if (ones == 1) emit({CellKind::Buf, c.name + "/co", {var[0]}, 0, {co}, c.source});
            else set_const(co, ones == 2);
          }
          action = kname + " reduced to wires (" + std::to_string(ones) + " constant ones)";
        } else if (ones == 0) {  // FA with one constant 0
          emit({CellKind::Ha, c.name, var, 0, {so, co}, c.source});
          action = "FA with constant 0 became HA";
        } else {  // FA with one constant 1: S = ~(x ^ y), CO = x | y
          NetId p = fresh("p");
          emit({CellKind::Xor, c.name + "/p", var, 0, {p}, c.source});
          emit({CellKind::Inv, c.name, {p}, 0, {so}, c.source});
          emit({CellKind::Or, c.name + "/co", var, 0, {co}, c.source});
          action = "FA with constant 1 became XNOR and OR";
        }
        break;
      }
      default:
        break;
    }
    return out_;
  }

 private:
  void set_const(NetId n, int v) {
    cv_[n] = v;
    std::string nm = out_.empty() ? cell_->name : cell_->name + "/k" + std::to_string(++extra_);
    emit({v ? CellKind::Const1 : CellKind::Const0, nm, {}, 0, {n}, cell_->source});
  }
  void emit(Cell c) { out_.push_back(std::move(c)); }
  NetId fresh(const std::string& local) {
    NetId n = nl_.add_net(cell_->name + "/" + local);
    cv_.push_back(-1);
    return n;
  }

  Netlist& nl_;
  std::vector<int>& cv_;
  const Cell* cell_ = nullptr;
  std::vector<Cell> out_;
  int extra_ = 0;
};

// Replaces the cell list of a netlist (keeping nets, ports and state).
Netlist with_cells(const Netlist& nl, std::vector<Cell> cells, const std::vector<std::string>& net_names) {
  Netlist out;
  out.name = nl.name;
  for (const auto& n : net_names) out.add_net(n);
  for (auto& c : cells) out.add_cell(std::move(c));
  for (std::size_t i = 0; i < nl.pis().size(); ++i) out.add_pi(nl.pis()[i], i >= nl.num_input_bits());
  for (std::size_t j = 0; j < nl.pos().size(); ++j) out.add_po(nl.pos()[j], nl.po_names()[j]);
  for (const auto& f : nl.input_fields()) out.add_input_field(f);
  for (const auto& f : nl.output_fields()) out.add_output_field(f);
  for (const auto& s : nl.state()) out.add_state_bit(s);
  out.finalize();
  return out;
}

}  // namespace

int Reduction::classes_removed() const {
  int n = 0;
  for (const auto& e : log) n += e.classes_before - e.classes_after;
  return n;
}

Netlist propagate_constants(const Netlist& src, std::vector<ReductionEntry>* log) {
  Netlist work = src;  // scratch for fresh nets
  std::vector<int> cv(src.num_nets(), -1);
  for (const auto& c : src.cells()) {
    if (c.kind == CellKind::Const0) cv[c.out[0]] = 0;
    if (c.kind == CellKind::Const1) cv[c.out[0]] = 1;
  }
  std::vector<std::optional<std::vector<Cell>>> repl(src.cells().size());
  ConstFolder folder(work, cv);
  bool changed = false;
  for (auto ci : src.topo()) {
    const auto& c = src.cells()[ci];
    if (c.kind == CellKind::Const0 || c.kind == CellKind::Const1) continue;
    bool has_const = false;
    for (NetId i : c.in) has_const = has_const || cv[i] >= 0;
    if (!has_const) continue;
    std::string action;
    auto cells = folder.fold(c, action);
    if (log) log->push_back({c.name, action, class_count(c), class_count(cells)});
    repl[ci] = std::move(cells);
    changed = true;
  }
  if (!changed) return src;

  std::vector<Cell> cells;
  for (std::size_t ci = 0; ci < src.cells().size(); ++ci) {
    if (repl[ci]) {
      for (auto& c : *repl[ci]) cells.push_back(std::move(c));
    } else {
      cells.push_back(src.cells()[ci]);
    }
  }
  std::vector<std::string> names;
  for (NetId n = 0; n < work.num_nets(); ++n) names.push_back(work.net_name(n));
  Netlist out = with_cells(src, std::move(cells), names);

  // Constants left without readers are dropped.
  std::vector<char> drop(out.cells().size(), 0);
  bool any = false;
  for (std::size_t ci = 0; ci < out.cells().size(); ++ci) {
    const auto& c = out.cells()[ci];
    if ((c.kind == CellKind::Const0 || c.kind == CellKind::Const1) && out.fanout(c.out[0]).empty() &&
        out.po_indices(c.out[0]).empty()) {
      drop[ci] = 1;
      any = true;
    }
  }
  if (any) remove_cells(out, drop);
  return out;
}

Reduction propagate_constants(const ElaboratedCircuit& e) {
  Reduction r{e, {}};
  r.circuit.netlist = propagate_constants(e.netlist, &r.log);
  return r;
}

Reduction propagate_opens(const ElaboratedCircuit& e) {
  const Netlist& nl = e.netlist;
  Reduction r{e, {}};
  std::vector<char> live_net(nl.num_nets(), 0);
  for (NetId p : nl.pos()) live_net[p] = 1;
  std::vector<char> drop(nl.cells().size(), 0);
  const auto& topo = nl.topo();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto& c = nl.cells()[*it];
    bool live = false;
    for (NetId o : c.out) live = live || live_net[o];
    if (!live) {
      drop[*it] = 1;
      continue;
    }
    for (NetId i : c.in) live_net[i] = 1;
  }
  bool any = false;
  for (std::size_t ci = 0; ci < nl.cells().size(); ++ci) {
    const auto& c = nl.cells()[ci];
    const int arity = static_cast<int>(c.in.size());
    if (drop[ci]) {
      any = true;
      r.log.push_back({c.name, "removed: no output reaches a PO", class_count(c), 0});
      continue;
    }
    if (c.out.size() < 2) continue;
    for (std::size_t o = 0; o < c.out.size(); ++o) {
      if (live_net[c.out[o]]) continue;
      int open = 0;
      for (const auto& t : enumerate_gifs(c.kind, arity))
        if (t.go == static_cast<int>(o)) ++open;
      r.log.push_back({c.name, "output " + cell_output_pins(c.kind)[o] + " open", class_count(c),
                       class_count(c) - open});
    }
  }
  if (any) {
    Netlist out = nl;
    remove_cells(out, drop);
    r.circuit.netlist = std::move(out);
  }
  return r;
}

std::vector<std::vector<std::uint64_t>> structural_po_reach(const Netlist& nl) {
  const std::size_t words = (nl.pos().size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> reach(nl.num_nets(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t j = 0; j < nl.pos().size(); ++j) reach[nl.pos()[j]][j / 64] |= std::uint64_t{1} << (j % 64);
  const auto& topo = nl.topo();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto& c = nl.cells()[*it];
    for (NetId i : c.in)
      for (NetId o : c.out)
        for (std::size_t w = 0; w < words; ++w) reach[i][w] |= reach[o][w];
  }
  return reach;
}

std::size_t GifPoUniverse::count(PointStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [s](const GifPoPoint& p) { return p.status == s; }));
}

NetId GifPoUniverse::go_net(std::uint32_t cls) const {
  const auto& k = classes[cls];
  return netlist().cells()[k.cell].out[k.go];
}

std::string GifPoUniverse::cell_name(std::size_t point) const {
  return netlist().cells()[classes[points[point].cls].cell].name;
}

std::string GifPoUniverse::out_pin(std::size_t point) const {
  const auto& k = classes[points[point].cls];
  return cell_output_pins(netlist().cells()[k.cell].kind)[k.go];
}

std::string GifPoUniverse::minterm(std::size_t point) const {
  const auto& k = classes[points[point].cls];
  return minterm_string(k.minterm, static_cast<int>(netlist().cells()[k.cell].in.size()));
}

std::string GifPoUniverse::po_name(std::size_t point) const { return netlist().po_names()[points[point].po]; }

std::string GifPoUniverse::members(std::size_t point) const {
  const auto cls = points[point].cls;
  const auto& k = classes[cls];
  const auto& c = netlist().cells()[k.cell];
  auto labels = gif_labels(c.kind, static_cast<int>(c.in.size()));
  return labels[cls - cell_first_class[k.cell]];
}

std::vector<std::vector<std::uint32_t>> GifPoUniverse::points_by_po() const {
  std::vector<std::vector<std::uint32_t>> by(netlist().pos().size());
  for (std::uint32_t i = 0; i < points.size(); ++i) by[points[i].po].push_back(i);
  return by;
}

GifPoUniverse build_universe(std::shared_ptr<const ElaboratedCircuit> e) {
  GifPoUniverse u;
  u.circuit = std::move(e);
  const Netlist& nl = u.netlist();
  auto reach = structural_po_reach(nl);
  for (std::uint32_t ci = 0; ci < nl.cells().size(); ++ci) {
    u.cell_first_class.push_back(static_cast<std::uint32_t>(u.classes.size()));
    const auto& c = nl.cells()[ci];
    for (const auto& t : enumerate_gifs(c.kind, static_cast<int>(c.in.size()))) {
      const auto cls = static_cast<std::uint32_t>(u.classes.size());
      u.classes.push_back({ci, static_cast<std::uint8_t>(t.go), t.minterm, t.alpha, t.members});
      u.class_first_point.push_back(static_cast<std::uint32_t>(u.points.size()));
      const auto& r = reach[c.out[static_cast<std::size_t>(t.go)]];
      for (std::uint32_t j = 0; j < nl.pos().size(); ++j)
        if ((r[j / 64] >> (j % 64)) & 1u) u.points.push_back({cls, j, PointStatus::Open});
    }
  }
  u.cell_first_class.push_back(static_cast<std::uint32_t>(u.classes.size()));
  u.class_first_point.push_back(static_cast<std::uint32_t>(u.points.size()));
  return u;
}

GifPoUniverse build_reduced_universe(const ElaboratedCircuit& e) {
  auto rc = propagate_constants(e);
  auto ro = propagate_opens(rc.circuit);
  auto u = build_universe(std::make_shared<const ElaboratedCircuit>(std::move(ro.circuit)));
  u.reduction_log = std::move(rc.log);
  u.reduction_log.insert(u.reduction_log.end(), ro.log.begin(), ro.log.end());
  return u;
}

// ---- false-path database -------------------------------------------------

namespace {

std::string unquote(std::string_view v) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') return std::string(v);
  v = v.substr(1, v.size() - 2);
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size()) ++i;
    s += v[i];
  }
  return s;
}

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') q += '\\';
    q += ch;
  }
  return q + "\"";
}

std::string glob_escape(const std::string& s) {
  std::string r;
  for (char ch : s) {
    if (ch == '[' || ch == ']' || ch == '*' || ch == '?' || ch == '\\') r += '\\';
    r += ch;
  }
  return r;
}

bool glob(const std::string& pattern, const std::string& s) { return fnmatch(pattern.c_str(), s.c_str(), 0) == 0; }

}  // namespace

FalsePathDB FalsePathDB::parse(std::string_view text) {
  FalsePathDB db;
  auto raw = text::split_lines(text);
  std::size_t first = 0;
  while (first < raw.size() && raw[first].find_first_not_of(" \t\r") == std::string::npos) ++first;
  if (first < raw.size()) {
    std::string head = raw[first];
    while (!head.empty() && (head.back() == '\r' || head.back() == ' ')) head.pop_back();
    if (head != kHeader)
      throw ParseError("fpd-header", "expected header '" + std::string(kHeader) + "'", static_cast<int>(first) + 1, 1);
  }
  for (const auto& line : text::tokenize(text)) {
    const auto& tk = line.tokens;
    if (tk.empty()) continue;
    if (tk[0].text != "unreachable")
      throw ParseError("syntax", "expected 'unreachable', got '" + tk[0].text + "'", line.number, tk[0].column);
    FpdEntry e;
    e.line = line.number;
    bool have[4] = {false, false, false, false};
    for (std::size_t i = 1; i < tk.size(); ++i) {
      const auto& t = tk[i].text;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ParseError("syntax", "expected key=value, got '" + t + "'", line.number, tk[i].column);
      std::string key = t.substr(0, eq);
      std::string val = unquote(std::string_view(t).substr(eq + 1));
      if (key == "gate") e.gate = val, have[0] = true;
      else if (key == "out") e.out = val, have[1] = true;
      else if (key == "m") e.m = val, have[2] = true;
      else if (key == "po") e.po = val, have[3] = true;
      else if (key == "reason") e.reason = val;
      else if (key == "author") e.author = val;
      else throw ParseError("syntax", "unknown key '" + key + "'", line.number, tk[i].column);
    }
    static const char* names[] = {"gate", "out", "m", "po"};
    for (int k = 0; k < 4; ++k)
      if (!have[k]) throw ParseError("syntax", std::string("missing key '") + names[k] + "'", line.number, 0);
    db.entries.push_back(std::move(e));
  }
  return db;
}

FalsePathDB FalsePathDB::load(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("io", "cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string FalsePathDB::format_entry(const FpdEntry& e) {
  return "unreachable gate=" + e.gate + " out=" + e.out + " m=" + e.m + " po=" + e.po + " reason=" + quote(e.reason) +
         " author=" + quote(e.author);
}

std::string FalsePathDB::serialize() const {
  std::string s(kHeader);
  s += '\n';
  for (const auto& e : entries) s += format_entry(e) + '\n';
  return s;
}

void FalsePathDB::save(const std::filesystem::path& p) const {
  std::ofstream out(p);
  if (!out) throw Error("io", "cannot write '" + p.string() + "'");
  out << serialize();
}

bool fpd_matches(const FpdEntry& e, const GifPoUniverse& u, std::size_t point) {
  return glob(e.gate, u.cell_name(point)) && e.out == u.out_pin(point) && glob(e.m, u.minterm(point)) &&
         glob(e.po, u.po_name(point));
}

FpdApplication apply_fpd(const GifPoUniverse& u, const FalsePathDB& db, const std::vector<char>* covered) {
  FpdApplication a{u, std::vector<std::size_t>(db.entries.size(), 0), {}, 0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t k = 0; k < db.entries.size(); ++k) {
      if (!fpd_matches(db.entries[k], u, i)) continue;
      if (covered && (*covered)[i])
        throw Error("covered-false-path", "covered point cannot be false path: " + u.cell_name(i) + " " +
                                              u.out_pin(i) + " m=" + u.minterm(i) + " po=" + u.po_name(i));
      ++a.matches[k];
      if (a.universe.points[i].status == PointStatus::Open) {
        a.universe.points[i].status = PointStatus::UnreachableFpd;
        ++a.marked;
      }
    }
  }
  for (std::size_t k = 0; k < db.entries.size(); ++k)
    if (a.matches[k] == 0) a.stale.push_back(k);
  return a;
}

FalsePathDB suggest_fpd(const GifPoUniverse& u, const std::vector<char>& covered, std::string_view reason,
                        std::string_view author) {
  FalsePathDB db;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.points[i].status != PointStatus::Open || covered[i]) continue;
    db.entries.push_back(
        {glob_escape(u.cell_name(i)), u.out_pin(i), u.minterm(i), glob_escape(u.po_name(i)), std::string(reason), std::string(author), 0});
  }
  return db;
}

GifPoUniverse mark_unreachable_auto(const GifPoUniverse& u, const std::vector<char>& covered) {
  GifPoUniverse r = u;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r.points[i].status == PointStatus::Open && !covered[i]) r.points[i].status = PointStatus::UnreachableAuto;
  return r;
}

}  // namespace gifpo
