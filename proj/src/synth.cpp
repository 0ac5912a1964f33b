#include "gifpo/synth.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "gifpo/error.hpp"
#include "gifpo/stuckat.hpp"

namespace gifpo {

std::string SynthStyle::label() const {
  switch (kind) {
    case StyleKind::Ripple: return "RIPPLE";
    case StyleKind::TwoLevel: return "TWO-LEVEL";
    case StyleKind::AoTree: return "AOTREE";
    case StyleKind::Rewrite: return "REWRITE(seed=" + std::to_string(seed) + ",steps=" + std::to_string(steps) + ")";
  }
  return "?";
}

std::string SynthStyle::prefix() const {
  switch (kind) {
    case StyleKind::Ripple: return "ripple";
    case StyleKind::TwoLevel: return "two-level";
    case StyleKind::AoTree: return "aotree";
    case StyleKind::Rewrite: return "rewrite";
  }
  return "?";
}

SynthStyle SynthStyle::parse(const std::string& name, std::uint64_t seed, int steps) {
  std::string n;
  for (char ch : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  SynthStyle s;
  if (n == "ripple") s.kind = StyleKind::Ripple;
  else if (n == "two-level" || n == "twolevel") s.kind = StyleKind::TwoLevel;
  else if (n == "aotree") s.kind = StyleKind::AoTree;
  else if (n == "rewrite") s.kind = StyleKind::Rewrite;
  else throw Error("unknown-style", "unknown synthesis style '" + name + "'");
  s.seed = seed;
  s.steps = steps;
  return s;
}

namespace {

constexpr NetId kNone = ~NetId{0};

// Copies ports and state from a source netlist and collects new cells.
class Builder {
 public:
  Builder(const Netlist& src, std::string prefix) : src_(src), prefix_(std::move(prefix)) {
    out_.name = src.name;
    map_.assign(src.num_nets(), kNone);
    for (std::size_t i = 0; i < src.pis().size(); ++i) {
      NetId s = src.pis()[i];
      map_[s] = net(src.net_name(s));
      pis_.insert(map_[s]);
      out_.add_pi(map_[s], i >= src.num_input_bits());
    }
  }

  const std::string& prefix() const { return prefix_; }
  bool is_pi(NetId d) const { return pis_.count(d) != 0; }
  NetId dst(NetId s) const {
    if (map_[s] == kNone) throw Error("internal", "unmapped net '" + src_.net_name(s) + "'");
    return map_[s];
  }
  void bind(NetId s, NetId d) { map_[s] = d; }
  /// Destination net for a source net, created with the source name.
  NetId own(NetId s) {
    if (map_[s] == kNone) map_[s] = net(src_.net_name(s));
    return map_[s];
  }

  NetId net(const std::string& name) {
    std::string n = name;
    for (int k = 1; names_.count(n); ++k) n = name + "$" + std::to_string(k);
    names_.insert(n);
    return out_.add_net(n);
  }
  std::string local(const Cell& c, const std::string& l) const { return prefix_ + "/" + c.name + "/" + l; }
  NetId local_net(const Cell& c, const std::string& l) { return net(local(c, l)); }

  NetId gate(CellKind k, const std::string& name, std::vector<NetId> in, std::uint32_t inv, NetId out, int source) {
    out_.add_cell(Cell{k, name, std::move(in), inv, {out}, source});
    return out;
  }

  Netlist finish() {
    const std::size_t nports = src_.pos().size() - src_.state().size();
    std::vector<NetId> po_net(src_.pos().size());
    std::unordered_set<NetId> used;
    for (std::size_t j = 0; j < src_.pos().size(); ++j) {
      NetId d = dst(src_.pos()[j]);
      const auto& name = src_.po_names()[j];
      if (is_pi(d) || used.count(d)) {
        NetId b = net(name);
        gate(CellKind::Buf, prefix_ + "/" + name + "/po", {d}, 0, b, -1);
        d = b;
      } else if (out_.net_name(d) != name && !names_.count(name)) {
        names_.erase(out_.net_name(d));
        out_.rename_net(d, name);
        names_.insert(name);
      }
      used.insert(d);
      po_net[j] = d;
      out_.add_po(d, name);
    }
    for (const auto& f : src_.input_fields()) out_.add_input_field(f);
    for (const auto& f : src_.output_fields()) out_.add_output_field(f);
    for (std::size_t s = 0; s < src_.state().size(); ++s) {
      auto st = src_.state()[s];
      st.q = dst(st.q);
      st.d = po_net[nports + s];
      out_.add_state_bit(st);
    }
    out_.finalize();
    sweep_dead_cells(out_);
    return std::move(out_);
  }

 private:
  const Netlist& src_;
  std::string prefix_;
  Netlist out_;
  std::vector<NetId> map_;
  std::unordered_set<NetId> pis_;
  std::unordered_set<std::string> names_;
};

// Pre-creates destination nets for every cell output so cells can be
// emitted in source order.
void own_outputs(const Netlist& src, Builder& b) {
  for (const auto& c : src.cells())
    for (NetId o : c.out) b.own(o);
}

std::vector<NetId> dst_inputs(const Cell& c, const Builder& b) {
  std::vector<NetId> in;
  for (NetId i : c.in) in.push_back(b.dst(i));
  return in;
}

// ---- RIPPLE ----------------------------------------------------------------

Netlist lower_ripple(const Netlist& src) {
  Builder b(src, "ripple");
  own_outputs(src, b);
  for (const auto& c : src.cells()) {
    auto in = dst_inputs(c, b);
    const std::string base = "ripple/" + c.name;
    switch (c.kind) {
      case CellKind::Const0:
      case CellKind::Const1:
      case CellKind::Buf:
      case CellKind::Inv:
      case CellKind::And:
      case CellKind::Or:
      case CellKind::Xor:
        b.gate(c.kind, base, in, c.inv, b.dst(c.out[0]), c.source);
        break;
      case CellKind::Mux2: {
        NetId ns = b.gate(CellKind::Inv, base + "/ns", {in[0]}, 0, b.local_net(c, "ns"), c.source);
        NetId t0 = b.gate(CellKind::And, base + "/t0", {ns, in[1]}, 0, b.local_net(c, "t0"), c.source);
        NetId t1 = b.gate(CellKind::And, base + "/t1", {in[0], in[2]}, 0, b.local_net(c, "t1"), c.source);
        b.gate(CellKind::Or, base, {t0, t1}, 0, b.dst(c.out[0]), c.source);
        break;
      }
      case CellKind::Ha:
        b.gate(CellKind::Xor, base + "/s", {in[0], in[1]}, 0, b.dst(c.out[0]), c.source);
        b.gate(CellKind::And, base + "/co", {in[0], in[1]}, 0, b.dst(c.out[1]), c.source);
        break;
      case CellKind::Fa: {
        NetId p = b.gate(CellKind::Xor, base + "/p", {in[1], in[2]}, 0, b.local_net(c, "p"), c.source);
        b.gate(CellKind::Xor, base + "/s", {p, in[0]}, 0, b.dst(c.out[0]), c.source);
        NetId g = b.gate(CellKind::And, base + "/g", {in[1], in[2]}, 0, b.local_net(c, "g"), c.source);
        NetId t = b.gate(CellKind::And, base + "/t", {p, in[0]}, 0, b.local_net(c, "t"), c.source);
        b.gate(CellKind::Or, base + "/co", {g, t}, 0, b.dst(c.out[1]), c.source);
        break;
      }
    }
  }
  return b.finish();
}

// ---- AOTREE ----------------------------------------------------------------

class AoTree {
 public:
  AoTree(const Netlist& src) : src_(src), b_(src, "aotree") {}

  Netlist run() {
    own_outputs(src_, b_);
    find_chains();
    for (std::size_t ci = 0; ci < src_.cells().size(); ++ci) {
      const auto& c = src_.cells()[ci];
      if (c.kind == CellKind::Ha || c.kind == CellKind::Fa) {
        if (head_[ci]) chain(static_cast<std::uint32_t>(ci));
        continue;
      }
      plain(c);
    }
    return b_.finish();
  }

 private:
  void find_chains() {
    const auto n = src_.cells().size();
    next_.assign(n, -1);
    head_.assign(n, 1);
    for (std::size_t ci = 0; ci < n; ++ci) {
      const auto& c = src_.cells()[ci];
      if (c.kind != CellKind::Ha && c.kind != CellKind::Fa) {
        head_[ci] = 0;
        continue;
      }
      int nx = -1, count = 0;
      for (const auto& s : src_.fanout(c.out[1]))
        if (src_.cells()[s.cell].kind == CellKind::Fa && s.pin == 0) {
          nx = static_cast<int>(s.cell);
          ++count;
        }
      if (count == 1) next_[ci] = nx;
    }
    for (std::size_t ci = 0; ci < n; ++ci)
      if (next_[ci] >= 0) head_[static_cast<std::size_t>(next_[ci])] = 0;
  }

  NetId inv(NetId x, const std::string& name, int src) {
    return b_.gate(CellKind::Inv, name, {x}, 0, b_.net(name), src);
  }

  // x ^ y as OR(AND(x, ~y), AND(~x, y)) driving `out`.
  void xor_ao(NetId x, NetId y, const std::string& base, NetId out, int src) {
    NetId nx = inv(x, base + "/nx", src);
    NetId ny = inv(y, base + "/ny", src);
    NetId t0 = b_.gate(CellKind::And, base + "/t0", {x, ny}, 0, b_.net(base + "/t0"), src);
    NetId t1 = b_.gate(CellKind::And, base + "/t1", {nx, y}, 0, b_.net(base + "/t1"), src);
    b_.gate(CellKind::Or, base, {t0, t1}, 0, out, src);
  }

  // Explicit inverters instead of input bubbles.
  std::vector<NetId> unbubble(const Cell& c, const std::string& base) {
    std::vector<NetId> in;
    for (std::size_t i = 0; i < c.in.size(); ++i) {
      NetId x = b_.dst(c.in[i]);
      if ((c.inv >> i) & 1u) x = inv(x, base + "/n" + std::to_string(i), c.source);
      in.push_back(x);
    }
    return in;
  }

  void plain(const Cell& c) {
    const std::string base = "aotree/" + c.name;
    auto in = unbubble(c, base);
    const NetId y = b_.dst(c.out[0]);
    switch (c.kind) {
      case CellKind::Xor: {
        NetId acc = in[0];
        for (std::size_t i = 1; i < in.size(); ++i) {
          const bool last = i + 1 == in.size();
          NetId o = last ? y : b_.net(base + "/x" + std::to_string(i));
          xor_ao(acc, in[i], last ? base : base + "/x" + std::to_string(i), o, c.source);
          acc = o;
        }
        break;
      }
      case CellKind::Mux2: {
        // Product of sums: (s | d0) & (~s | d1).
        NetId ns = inv(in[0], base + "/ns", c.source);
        NetId t0 = b_.gate(CellKind::Or, base + "/t0", {in[0], in[1]}, 0, b_.net(base + "/t0"), c.source);
        NetId t1 = b_.gate(CellKind::Or, base + "/t1", {ns, in[2]}, 0, b_.net(base + "/t1"), c.source);
        b_.gate(CellKind::And, base, {t0, t1}, 0, y, c.source);
        break;
      }
      default:
        b_.gate(c.kind, base, in, 0, y, c.source);
        break;
    }
  }

  // Carry into bit k of a chain: OR over j < k of a_j & b_j & p_{j+1..k-1},
  // plus cin & p_{0..k-1} when the chain has a carry-in. Each carry builds
  // its own propagate terms.
  void carry(std::size_t k, const std::vector<NetId>& a, const std::vector<NetId>& bb, std::optional<NetId> cin,
             const Cell& owner, NetId out) {
    const std::string base = "aotree/" + owner.name + "/c";
    const int src = owner.source;
    std::vector<NetId> p(k, kNone);
    const std::size_t pfirst = cin ? 0 : 1;
    for (std::size_t i = pfirst; i < k; ++i) {
      const std::string nm = base + "/p" + std::to_string(i);
      p[i] = b_.gate(CellKind::Or, nm, {a[i], bb[i]}, 0, b_.net(nm), src);
    }
    std::vector<std::vector<NetId>> terms;
    if (cin) {
      std::vector<NetId> t{*cin};
      for (std::size_t i = 0; i < k; ++i) t.push_back(p[i]);
      terms.push_back(std::move(t));
    }
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<NetId> t{a[j], bb[j]};
      for (std::size_t i = j + 1; i < k; ++i) t.push_back(p[i]);
      terms.push_back(std::move(t));
    }
    if (terms.size() == 1) {
      b_.gate(CellKind::And, base, terms[0], 0, out, src);
      return;
    }
    std::vector<NetId> ors;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const std::string nm = base + "/t" + std::to_string(t);
      ors.push_back(b_.gate(CellKind::And, nm, terms[t], 0, b_.net(nm), src));
    }
    b_.gate(CellKind::Or, base, ors, 0, out, src);
  }

  void chain(std::uint32_t head) {
    std::vector<std::uint32_t> cells;
    for (int ci = static_cast<int>(head); ci >= 0; ci = next_[static_cast<std::size_t>(ci)])
      cells.push_back(static_cast<std::uint32_t>(ci));
    const auto& h = src_.cells()[head];
    std::optional<NetId> cin;
    if (h.kind == CellKind::Fa) cin = b_.dst(h.in[0]);
    std::vector<NetId> a, bb;
    for (auto ci : cells) {
      const auto& c = src_.cells()[ci];
      const std::size_t off = c.kind == CellKind::Fa ? 1 : 0;
      a.push_back(b_.dst(c.in[off]));
      bb.push_back(b_.dst(c.in[off + 1]));
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const auto& c = src_.cells()[cells[k]];
      carry(k + 1, a, bb, cin, c, b_.dst(c.out[1]));
      const std::string base = "aotree/" + c.name + "/s";
      const std::optional<NetId> ci = k == 0 ? cin : std::optional<NetId>(b_.dst(c.in[0]));
      if (!ci) {
        xor_ao(a[k], bb[k], base, b_.dst(c.out[0]), c.source);
      } else {
        NetId p = b_.net(base + "/p");
        xor_ao(a[k], bb[k], base + "/p", p, c.source);
        xor_ao(p, *ci, base, b_.dst(c.out[0]), c.source);
      }
    }
  }

  const Netlist& src_;
  Builder b_;
  std::vector<int> next_;
  std::vector<char> head_;
};

// ---- TWO-LEVEL -------------------------------------------------------------

using Lit = std::uint64_t;  // net << 1 | negated
using Cube = std::vector<Lit>;
using Sop = std::vector<Cube>;

Lit lit(NetId n, bool neg) { return (Lit{n} << 1) | (neg ? 1u : 0u); }
NetId lit_net(Lit l) { return static_cast<NetId>(l >> 1); }
bool lit_neg(Lit l) { return (l & 1u) != 0; }

struct LocalLit {
  int pin;
  bool neg;
};
using LocalSop = std::vector<std::vector<LocalLit>>;

LocalSop parity_sop(int arity) {
  LocalSop s;
  for (std::uint32_t m = 0; m < (1u << arity); ++m) {
    if (std::popcount(m) % 2 == 0) continue;
    std::vector<LocalLit> cube;
    for (int p = 0; p < arity; ++p) cube.push_back({p, ((m >> (arity - 1 - p)) & 1u) == 0});
    s.push_back(std::move(cube));
  }
  return s;
}

// Irredundant sum of products of one cell output over its pins (bubbles
// folded into literal polarity).
LocalSop local_sop(const Cell& c, int output) {
  const int n = static_cast<int>(c.in.size());
  LocalSop s;
  switch (c.kind) {
    case CellKind::Const0: break;
    case CellKind::Const1: s = {{}}; break;
    case CellKind::Buf: s = {{{0, false}}}; break;
    case CellKind::Inv: s = {{{0, true}}}; break;
    case CellKind::And: {
      std::vector<LocalLit> cube;
      for (int p = 0; p < n; ++p) cube.push_back({p, false});
      s = {cube};
      break;
    }
    case CellKind::Or:
      for (int p = 0; p < n; ++p) s.push_back({{p, false}});
      break;
    case CellKind::Xor: s = parity_sop(n); break;
    case CellKind::Mux2: s = {{{0, true}, {1, false}}, {{0, false}, {2, false}}}; break;
    case CellKind::Ha:
      s = output == 0 ? parity_sop(2) : LocalSop{{{0, false}, {1, false}}};
      break;
    case CellKind::Fa:
      s = output == 0 ? parity_sop(3)
                      : LocalSop{{{1, false}, {2, false}}, {{0, false}, {1, false}}, {{0, false}, {2, false}}};
      break;
  }
  for (auto& cube : s)
    for (auto& l : cube)
      if ((c.inv >> l.pin) & 1u) l.neg = !l.neg;
  return s;
}

// Product of two sums; contradictory cubes vanish, duplicates are merged.
Sop product(const Sop& x, const Sop& y) {
  Sop out;
  std::set<Cube> seen;
  for (const auto& a : x)
    for (const auto& b : y) {
      Cube c;
      std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
      c.erase(std::unique(c.begin(), c.end()), c.end());
      bool clash = false;
      for (std::size_t i = 1; i < c.size(); ++i) clash = clash || lit_net(c[i]) == lit_net(c[i - 1]);
      if (clash || !seen.insert(c).second) continue;
      out.push_back(std::move(c));
    }
  return out;
}

class TwoLevel {
 public:
  TwoLevel(const Netlist& src, const SynthStyle& st) : src_(src), st_(st), b_(src, "two-level") {}

  Netlist run() {
    check_cones();
    memo_.resize(src_.num_nets());
    mat_.assign(src_.num_nets(), kNone);
    for (NetId p : src_.pos()) {
      NetId d = materialize(p);
      b_.bind(p, d);
    }
    return b_.finish();
  }

 private:
  void check_cones() {
    std::vector<std::vector<char>> seen;
    for (std::size_t j = 0; j < src_.pos().size(); ++j) {
      std::vector<char> visited(src_.num_nets(), 0);
      std::vector<NetId> stack{src_.pos()[j]};
      int pis = 0;
      while (!stack.empty()) {
        NetId n = stack.back();
        stack.pop_back();
        if (visited[n]) continue;
        visited[n] = 1;
        const int d = src_.driver(n);
        if (d < 0) {
          if (src_.is_pi(n)) ++pis;
          continue;
        }
        for (NetId i : src_.cells()[static_cast<std::size_t>(d)].in) stack.push_back(i);
      }
      if (pis > st_.cone_pi_limit)
        throw Error("cone-too-wide", "cone too wide: PO '" + src_.po_names()[j] + "' depends on " +
                                         std::to_string(pis) + " PI bits (limit " +
                                         std::to_string(st_.cone_pi_limit) + ")");
    }
  }

  bool is_const(NetId n, int& v) const {
    const int d = src_.driver(n);
    if (d < 0) return false;
    const auto k = src_.cells()[static_cast<std::size_t>(d)].kind;
    if (k == CellKind::Const0) v = 0;
    else if (k == CellKind::Const1) v = 1;
    else return false;
    return true;
  }

  Sop literal_sop(NetId x, bool neg) {
    int v = 0;
    if (is_const(x, v)) return (v ^ (neg ? 1 : 0)) ? Sop{{}} : Sop{};
    if (src_.is_pi(x)) return {{lit(b_.dst(x), neg)}};
    if (!neg) return sop(x);
    return {{lit(materialize(x), true)}};
  }

  // Positive SOP of a source net over PIs and kept nets.
  const Sop& sop(NetId n) {
    if (memo_[n]) return *memo_[n];
    if (mat_[n] != kNone) {
      memo_[n] = Sop{{lit(mat_[n], false)}};
      return *memo_[n];
    }
    const auto& c = src_.cells()[static_cast<std::size_t>(src_.driver(n))];
    const int o = c.out[0] == n ? 0 : 1;
    Sop result;
    bool overflow = false;
    std::set<Cube> seen;
    for (const auto& lc : local_sop(c, o)) {
      Sop acc{{}};
      for (const auto& l : lc) {
        acc = product(acc, literal_sop(c.in[static_cast<std::size_t>(l.pin)], l.neg));
        if (static_cast<int>(acc.size()) > st_.max_terms) {
          overflow = true;
          break;
        }
      }
      if (overflow) break;
      for (auto& cube : acc)
        if (seen.insert(cube).second) result.push_back(std::move(cube));
      if (static_cast<int>(result.size()) > st_.max_terms) {
        overflow = true;
        break;
      }
    }
    if (overflow) {
      NetId m = build_local(n, c, o);
      mat_[n] = m;
      result = {{lit(m, false)}};
    }
    memo_[n] = std::move(result);
    return *memo_[n];
  }

  // A destination net carrying source net n.
  NetId materialize(NetId n) {
    if (src_.is_pi(n)) return b_.dst(n);
    if (mat_[n] != kNone) return mat_[n];
    const Sop s = sop(n);
    if (mat_[n] != kNone) return mat_[n];
    const auto& c = src_.cells()[static_cast<std::size_t>(src_.driver(n))];
    NetId m = build(s, src_.net_name(n), c);
    mat_[n] = m;
    return m;
  }

  // Keeps node n as a net built from its cell's local SOP over kept inputs.
  NetId build_local(NetId n, const Cell& c, int o) {
    Sop s;
    for (const auto& lc : local_sop(c, o)) {
      Cube cube;
      bool zero = false;
      for (const auto& l : lc) {
        const NetId x = c.in[static_cast<std::size_t>(l.pin)];
        int v = 0;
        if (is_const(x, v)) {
          if ((v ^ (l.neg ? 1 : 0)) == 0) zero = true;
          continue;
        }
        cube.push_back(lit(materialize(x), l.neg));
      }
      if (zero) continue;
      std::sort(cube.begin(), cube.end());
      s.push_back(std::move(cube));
    }
    return build(s, src_.net_name(n), c);
  }

  NetId build(const Sop& s, const std::string& name, const Cell& c) {
    const std::string base = "two-level/" + c.name;
    if (s.empty()) return b_.gate(CellKind::Const0, base + "/k", {}, 0, b_.net(name), c.source);
    if (s.size() == 1 && s[0].empty()) return b_.gate(CellKind::Const1, base + "/k", {}, 0, b_.net(name), c.source);
    auto and_of = [&](const Cube& cube, NetId out, const std::string& cname) {
      std::vector<NetId> in;
      std::uint32_t inv = 0;
      for (std::size_t i = 0; i < cube.size(); ++i) {
        in.push_back(lit_net(cube[i]));
        if (lit_neg(cube[i])) inv |= 1u << i;
      }
      return b_.gate(CellKind::And, cname, in, inv, out, c.source);
    };
    if (s.size() == 1) {
      const Cube& cube = s[0];
      if (cube.size() == 1) {
        if (!lit_neg(cube[0])) return lit_net(cube[0]);
        return b_.gate(CellKind::Inv, base, {lit_net(cube[0])}, 0, b_.net(name), c.source);
      }
      return and_of(cube, b_.net(name), base);
    }
    std::vector<NetId> in;
    std::uint32_t inv = 0;
    for (std::size_t t = 0; t < s.size(); ++t) {
      const Cube& cube = s[t];
      if (cube.size() == 1) {
        in.push_back(lit_net(cube[0]));
        if (lit_neg(cube[0])) inv |= 1u << t;
        continue;
      }
      const std::string nm = base + "/t" + std::to_string(t);
      in.push_back(and_of(cube, b_.net(nm), nm));
    }
    return b_.gate(CellKind::Or, base, in, inv, b_.net(name), c.source);
  }

  const Netlist& src_;
  SynthStyle st_;
  Builder b_;
  std::vector<std::optional<Sop>> memo_;
  std::vector<NetId> mat_;
};

// ---- REWRITE ---------------------------------------------------------------

// Evaluates a small cell region for a support assignment; returns the value
// of every net it touches.
std::unordered_map<NetId, int> eval_region(const std::vector<Cell>& cells, const std::vector<NetId>& support,
                                           std::uint32_t assignment) {
  std::unordered_map<NetId, int> v;
  for (std::size_t i = 0; i < support.size(); ++i) v[support[i]] = (assignment >> i) & 1u;
  std::vector<char> done(cells.size(), 0);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      if (done[ci]) continue;
      const auto& c = cells[ci];
      bool ready = true;
      for (NetId i : c.in) ready = ready && v.count(i);
      if (!ready) continue;
      std::uint32_t m = 0;
      for (std::size_t p = 0; p < c.in.size(); ++p) m = (m << 1) | ((v[c.in[p]] ^ (c.inv >> p)) & 1u);
      auto outs = eval_cell_local(c.kind, static_cast<int>(c.in.size()), m);
      for (std::size_t o = 0; o < c.out.size(); ++o) v[c.out[o]] = (outs >> o) & 1u;
      done[ci] = 1;
      progress = true;
    }
  }
  return v;
}

// Truth-table check of a local rewrite: `before` and `after` must agree on
// every output pair for all assignments of their combined support.
bool region_equivalent(const std::vector<Cell>& before, const std::vector<Cell>& after,
                       const std::vector<std::pair<NetId, NetId>>& outs) {
  std::set<NetId> produced_b, produced_a, support;
  for (const auto& c : before)
    for (NetId o : c.out) produced_b.insert(o);
  for (const auto& c : after)
    for (NetId o : c.out) produced_a.insert(o);
  for (const auto& c : before)
    for (NetId i : c.in)
      if (!produced_b.count(i)) support.insert(i);
  for (const auto& c : after)
    for (NetId i : c.in)
      if (!produced_a.count(i)) support.insert(i);
  for (auto [x, y] : outs) {
    if (!produced_b.count(x)) support.insert(x);
    if (!produced_a.count(y)) support.insert(y);
  }
  std::vector<NetId> sup(support.begin(), support.end());
  if (sup.size() > 16) return false;
  for (std::uint32_t a = 0; a < (1u << sup.size()); ++a) {
    auto vb = eval_region(before, sup, a);
    auto va = eval_region(after, sup, a);
    for (auto [x, y] : outs)
      if (vb.at(x) != va.at(y)) return false;
  }
  return true;
}

class Rewriter {
 public:
  Rewriter(Netlist nl, std::uint64_t seed, std::vector<std::string>* log) : nl_(std::move(nl)), rng_(seed), log_(log) {
    if (!nl_.finalized()) nl_.finalize();
  }

  Netlist run(int steps) {
    for (step_ = 0; step_ < steps; ++step_) {
      // The first step always duplicates a driver when one qualifies.
      if (step_ == 0 && duplicate_driver()) continue;
      const int first = static_cast<int>(pick(6));
      bool applied = false;
      for (int r = 0; r < 6 && !applied; ++r) applied = apply((first + r) % 6);
      if (!applied) break;
    }
    nl_.finalize();
    return std::move(nl_);
  }

 private:
  std::uint64_t pick(std::size_t n) { return rng_() % n; }

  bool apply(int rule) {
    switch (rule) {
      case 0: return demorgan();
      case 1: return xor_expand();
      case 2: return factor();
      case 3: return unfactor();
      case 4: return buffer_insert();
      default: return duplicate_driver();
    }
  }

  std::string tag(const std::string& what) const { return what + std::to_string(step_); }
  std::string local(std::string owner, const std::string& what) const {
    for (bool again = true; again;) {
      again = false;
      for (std::string_view p : {"rewrite/", "ripple/"})
        if (owner.starts_with(p)) {
          owner.erase(0, p.size());
          again = true;
        }
    }
    return "rewrite/" + owner + "/" + tag(what);
  }

  void record(const std::string& rule, const std::string& target) {
    if (log_) log_->push_back(rule + " " + target);
  }

  void verify(const std::vector<Cell>& before, const std::vector<Cell>& after,
              const std::vector<std::pair<NetId, NetId>>& outs, const std::string& rule) {
    if (!region_equivalent(before, after, outs))
      throw Error("equivalence", "rewrite '" + rule + "' failed its local truth-table check");
  }

  std::vector<std::uint32_t> cells_where(const std::function<bool(const Cell&)>& f) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t ci = 0; ci < nl_.cells().size(); ++ci)
      if (f(nl_.cells()[ci])) out.push_back(ci);
    return out;
  }

  bool demorgan() {
    auto cand = cells_where([](const Cell& c) {
      return (c.kind == CellKind::And || c.kind == CellKind::Or) && c.in.size() >= 2;
    });
    if (cand.empty()) return false;
    const auto ci = cand[pick(cand.size())];
    Cell before = nl_.cells()[ci];
    NetId t = nl_.add_net(local(before.name, "dm"));
    Cell swapped = before;
    swapped.kind = before.kind == CellKind::And ? CellKind::Or : CellKind::And;
    swapped.inv = before.inv ^ ((1u << before.in.size()) - 1);
    swapped.out = {t};
    Cell inv{CellKind::Inv, local(before.name, "dm"), {t}, 0, before.out, before.source};
    verify({before}, {swapped, inv}, {{before.out[0], before.out[0]}}, "demorgan");
    nl_.mutable_cells()[ci] = swapped;
    nl_.add_cell(inv);
    record("demorgan", before.name);
    nl_.finalize();
    return true;
  }

  bool xor_expand() {
    auto cand = cells_where([](const Cell& c) { return c.kind == CellKind::Xor && c.in.size() == 2 && c.inv == 0; });
    if (cand.empty()) return false;
    const auto ci = cand[pick(cand.size())];
    Cell before = nl_.cells()[ci];
    NetId t0 = nl_.add_net(local(before.name, "x0_"));
    NetId t1 = nl_.add_net(local(before.name, "x1_"));
    Cell a0{CellKind::And, local(before.name, "x0_"), {before.in[0], before.in[1]}, 0b10, {t0}, before.source};
    Cell a1{CellKind::And, local(before.name, "x1_"), {before.in[0], before.in[1]}, 0b01, {t1}, before.source};
    Cell o{CellKind::Or, before.name, {t0, t1}, 0, before.out, before.source};
    verify({before}, {a0, a1, o}, {{before.out[0], before.out[0]}}, "xor-expand");
    nl_.mutable_cells()[ci] = o;
    nl_.add_cell(a0);
    nl_.add_cell(a1);
    record("xor-expand", before.name);
    nl_.finalize();
    return true;
  }

  bool factor() {
    auto cand = cells_where([](const Cell& c) {
      return (c.kind == CellKind::And || c.kind == CellKind::Or) && c.in.size() >= 3;
    });
    if (cand.empty()) return false;
    const auto ci = cand[pick(cand.size())];
    Cell before = nl_.cells()[ci];
    NetId t = nl_.add_net(local(before.name, "f"));
    Cell inner{before.kind, local(before.name, "f"), {before.in[0], before.in[1]}, before.inv & 3u, {t},
               before.source};
    Cell outer = before;
    outer.in.erase(outer.in.begin(), outer.in.begin() + 2);
    outer.in.insert(outer.in.begin(), t);
    outer.inv = (before.inv >> 2) << 1;
    verify({before}, {inner, outer}, {{before.out[0], before.out[0]}}, "factor");
    nl_.mutable_cells()[ci] = outer;
    nl_.add_cell(inner);
    record("factor", before.name);
    nl_.finalize();
    return true;
  }

  bool unfactor() {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cand;  // (cell, pin)
    for (std::uint32_t ci = 0; ci < nl_.cells().size(); ++ci) {
      const auto& c = nl_.cells()[ci];
      if (c.kind != CellKind::And && c.kind != CellKind::Or) continue;
      for (std::uint32_t p = 0; p < c.in.size(); ++p) {
        if ((c.inv >> p) & 1u) continue;
        const NetId x = c.in[p];
        const int d = nl_.driver(x);
        if (d < 0 || nl_.cells()[static_cast<std::size_t>(d)].kind != c.kind) continue;
        if (nl_.fanout(x).size() != 1 || !nl_.po_indices(x).empty()) continue;
        if (c.in.size() + nl_.cells()[static_cast<std::size_t>(d)].in.size() > 24) continue;
        cand.push_back({ci, p});
      }
    }
    if (cand.empty()) return false;
    const auto [ci, p] = cand[pick(cand.size())];
    const Cell before = nl_.cells()[ci];
    const auto di = static_cast<std::uint32_t>(nl_.driver(before.in[p]));
    const Cell inner = nl_.cells()[di];
    Cell merged = before;
    merged.in.clear();
    merged.inv = 0;
    auto push = [&](NetId n, bool b) {
      if (b) merged.inv |= 1u << merged.in.size();
      merged.in.push_back(n);
    };
    for (std::uint32_t q = 0; q < before.in.size(); ++q) {
      if (q == p) {
        for (std::size_t r = 0; r < inner.in.size(); ++r) push(inner.in[r], (inner.inv >> r) & 1u);
      } else {
        push(before.in[q], (before.inv >> q) & 1u);
      }
    }
    verify({before, inner}, {merged}, {{before.out[0], before.out[0]}}, "unfactor");
    nl_.mutable_cells()[ci] = merged;
    std::vector<char> drop(nl_.cells().size(), 0);
    drop[di] = 1;
    record("unfactor", before.name);
    nl_.finalize();
    remove_cells(nl_, drop);
    return true;
  }

  bool buffer_insert() {
    std::vector<NetId> cand;
    for (NetId n = 0; n < nl_.num_nets(); ++n)
      if (!nl_.fanout(n).empty()) cand.push_back(n);
    if (cand.empty()) return false;
    const NetId n = cand[pick(cand.size())];
    const auto& sinks = nl_.fanout(n);
    const auto s = sinks[pick(sinks.size())];
    const int d = nl_.driver(n);
    const std::string owner = d >= 0 ? nl_.cells()[static_cast<std::size_t>(d)].name : nl_.net_name(n);
    NetId b = nl_.add_net(local(owner, "b"));
    Cell buf{CellKind::Buf, local(owner, "b"), {n}, 0, {b}, -1};
    verify({}, {buf}, {{n, b}}, "buffer-insert");
    nl_.mutable_cells()[s.cell].in[s.pin] = b;
    nl_.add_cell(buf);
    record("buffer-insert", nl_.net_name(n));
    nl_.finalize();
    return true;
  }

  bool duplicate_driver() {
    std::vector<NetId> cand;
    for (NetId n = 0; n < nl_.num_nets(); ++n) {
      const int d = nl_.driver(n);
      if (d < 0) continue;
      const auto k = nl_.cells()[static_cast<std::size_t>(d)].kind;
      if (k == CellKind::Const0 || k == CellKind::Const1) continue;
      const std::size_t uses = nl_.fanout(n).size() + (nl_.po_indices(n).empty() ? 0 : 1);
      if (uses >= 2 && !nl_.fanout(n).empty()) cand.push_back(n);
    }
    if (cand.empty()) return false;
    const NetId n = cand[pick(cand.size())];
    const Cell orig = nl_.cells()[static_cast<std::size_t>(nl_.driver(n))];
    auto sinks = nl_.fanout(n);
    for (std::size_t i = sinks.size(); i > 1; --i) std::swap(sinks[i - 1], sinks[pick(i)]);
    const bool po = !nl_.po_indices(n).empty();
    const std::size_t max_move = po ? sinks.size() : sinks.size() - 1;
    const std::size_t move = 1 + pick(max_move);
    NetId dup = nl_.add_net(local(orig.name, "dup"));
    Cell copy = orig;
    copy.name = local(orig.name, "dup");
    copy.out = {dup};
    verify({orig}, {orig, copy}, {{n, dup}}, "duplicate-driver");
    auto& cells = nl_.mutable_cells();
    for (std::size_t i = 0; i < move; ++i) cells[sinks[i].cell].in[sinks[i].pin] = dup;
    nl_.add_cell(copy);
    record("duplicate-driver", nl_.net_name(n));
    nl_.finalize();
    return true;
  }

  Netlist nl_;
  std::mt19937_64 rng_;
  std::vector<std::string>* log_;
  int step_ = 0;
};

}  // namespace

Netlist lower(const ElaboratedCircuit& e, const SynthStyle& style, std::vector<std::string>* rewrites) {
  const Netlist& src = e.netlist;
  switch (style.kind) {
    case StyleKind::Ripple: return lower_ripple(src);
    case StyleKind::AoTree: return AoTree(src).run();
    case StyleKind::TwoLevel: return TwoLevel(src, style).run();
    case StyleKind::Rewrite: {
      Netlist base = lower_ripple(src);
      if (style.steps <= 0) return base;
      return Rewriter(std::move(base), style.seed, rewrites).run(style.steps);
    }
  }
  throw Error("internal", "unknown style");
}

int default_rewrite_steps(const Netlist& ripple) {
  return std::max(8, static_cast<int>(ripple.cells().size() / 2));
}

std::vector<Variant> variant_suite(const ElaboratedCircuit& e, int k, std::uint64_t seed) {
  if (k < 1) throw Error("arity", "variant count must be at least 1");
  const bool check = e.netlist.pis().size() <= 20;
  const int steps = default_rewrite_steps(lower_ripple(e.netlist));
  std::vector<SynthStyle> plan = {SynthStyle{StyleKind::Ripple}, SynthStyle{StyleKind::TwoLevel},
                                  SynthStyle{StyleKind::Rewrite, seed, steps}, SynthStyle{StyleKind::AoTree}};
  std::uint64_t next_seed = seed + 1;
  std::vector<Variant> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; static_cast<int>(out.size()) < k; ++i) {
    SynthStyle st = i < plan.size() ? plan[i] : SynthStyle{StyleKind::Rewrite, next_seed++, steps};
    if (i > 64 + static_cast<std::size_t>(k)) throw Error("internal", "could not find distinct variants");
    Variant v{st, {}, {}, false};
    try {
      v.netlist = lower(e, st, &v.rewrites);
    } catch (const Error& err) {
      if (err.code() == "cone-too-wide") continue;
      throw;
    }
    auto text = print_gate_netlist(v.netlist);
    // Names carry the style prefix; compare structure with it stripped.
    for (const auto& p : {"ripple/", "two-level/", "aotree/", "rewrite/"})
      for (std::size_t at; (at = text.find(p)) != std::string::npos;) text.erase(at, std::char_traits<char>::length(p));
    if (!seen.insert(text).second) continue;
    if (check) {
      if (auto cx = exhaustive_equivalence(e.netlist, v.netlist))
        throw Error("equivalence", st.label() + " is not equivalent: " + cx->describe(e.netlist));
      v.checked = true;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace gifpo
