#include "gifpo/circuit.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gifpo/error.hpp"
#include "text.hpp"

namespace gifpo {

namespace {

struct KindEntry {
  std::string_view name;
  GateKind kind;
};

constexpr KindEntry kKinds[] = {
    {"not", GateKind::Not},       {"and", GateKind::And},       {"or", GateKind::Or},
    {"xor", GateKind::Xor},       {"rand", GateKind::RAnd},     {"ror", GateKind::ROr},
    {"rxor", GateKind::RXor},     {"mux2", GateKind::Mux2},     {"eq", GateKind::Eq},
    {"lt", GateKind::Lt},         {"add", GateKind::Add},       {"sub", GateKind::Sub},
    {"shl", GateKind::Shl},       {"shr", GateKind::Shr},       {"const", GateKind::Const},
    {"assign", GateKind::Assign}, {"slice", GateKind::Slice},   {"concat", GateKind::Concat},
    {"mul", GateKind::Mul},
};

// Accepted spellings that normalize to a canonical kind. The two-input forms
// also pin the arity.
struct Alias {
  std::string_view name;
  GateKind kind;
  int arity;
};

constexpr Alias kAliases[] = {
    {"and2", GateKind::And, 2}, {"or2", GateKind::Or, 2},   {"xor2", GateKind::Xor, 2},
    {"inv", GateKind::Not, 1},  {"buf", GateKind::Assign, 1},
};

bool has_param(GateKind k) {
  return k == GateKind::Shl || k == GateKind::Shr || k == GateKind::Slice;
}

[[noreturn]] void fail(const char* code, const std::string& msg, int line, int col) {
  throw ParseError(code, msg, line, col);
}

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool valid_identifier(std::string_view s) {
  if (s.empty() || s[0] == '~' || s[0] == '"') return false;
  return s.find('"') == std::string_view::npos;
}

int expect_width(const text::Token& tok, int line) {
  int w = 0;
  if (!parse_int(tok.text, w)) fail("syntax", "expected width, got '" + tok.text + "'", line, tok.column);
  if (w < 1 || w > 64) fail("width-mismatch", "net width must be in 1..64", line, tok.column);
  return w;
}

}  // namespace

std::string_view kind_name(GateKind kind) {
  for (const auto& e : kKinds)
    if (e.kind == kind) return e.name;
  return "?";
}

std::optional<GateKind> kind_from_name(std::string_view name) {
  for (const auto& e : kKinds)
    if (e.name == name) return e.kind;
  for (const auto& a : kAliases)
    if (a.name == name) return a.kind;
  return std::nullopt;
}

int Circuit::net_id(std::string_view n) const {
  for (size_t i = 0; i < nets.size(); ++i)
    if (nets[i].name == n) return static_cast<int>(i);
  return -1;
}

int Circuit::input_bits() const {
  int n = 0;
  for (int i : inputs) n += width(i);
  return n;
}

int Circuit::state_bits() const {
  int n = 0;
  for (const auto& r : registers) n += width(r.q);
  return n;
}

Circuit parse_circuit(std::string_view source) {
  Circuit c;
  c.source_lines = text::split_lines(source);
  auto lines = text::tokenize(source);
  if (lines.empty()) fail("syntax", "empty netlist", 1, 0);

  std::unordered_map<std::string, int> net_index;
  std::unordered_map<std::string, int> instance_line;

  const auto& first = lines.front();
  if (first.tokens[0].text != "circuit" || first.tokens.size() != 2)
    fail("syntax", "netlist must start with 'circuit <name>'", first.number, 1);
  c.name = first.tokens[1].text;

  const auto& last = lines.back();
  if (last.tokens.size() != 1 || last.tokens[0].text != "end" || lines.size() < 2)
    fail("syntax", "netlist must end with 'end'", last.number, 1);

  auto declare = [&](const text::Token& tok, int width, NetRole role, int line) {
    if (!valid_identifier(tok.text)) fail("syntax", "invalid net name '" + tok.text + "'", line, tok.column);
    if (net_index.count(tok.text)) fail("duplicate-name", "net '" + tok.text + "' declared twice", line, tok.column);
    net_index[tok.text] = static_cast<int>(c.nets.size());
    c.nets.push_back({tok.text, width, role, line});
    return static_cast<int>(c.nets.size()) - 1;
  };
  auto claim_instance = [&](const text::Token& tok, int line) {
    if (!valid_identifier(tok.text)) fail("syntax", "invalid instance name '" + tok.text + "'", line, tok.column);
    if (instance_line.count(tok.text))
      fail("duplicate-name", "instance '" + tok.text + "' declared twice", line, tok.column);
    instance_line[tok.text] = line;
  };

  // Pass 1: declarations, so gates may reference nets declared later.
  std::vector<const text::Line*> pending;
  for (size_t li = 1; li + 1 < lines.size(); ++li) {
    const auto& l = lines[li];
    const auto& kw = l.tokens[0].text;
    if (kw == "input" || kw == "output" || kw == "wire") {
      if (l.tokens.size() != 3) fail("syntax", "expected '" + kw + " <net> <width>'", l.number, 1);
      NetRole role = kw == "input" ? NetRole::Input : kw == "output" ? NetRole::Output : NetRole::Wire;
      int id = declare(l.tokens[1], expect_width(l.tokens[2], l.number), role, l.number);
      if (role == NetRole::Input) c.inputs.push_back(id);
      if (role == NetRole::Output) c.outputs.push_back(id);
    } else if (kw == "const") {
      if (l.tokens.size() != 4) fail("syntax", "expected 'const <net> <width> 0x<hex>'", l.number, 1);
      int w = expect_width(l.tokens[2], l.number);
      unsigned long long v = 0;
      if (!text::parse_hex(l.tokens[3].text, v))
        fail("syntax", "expected hex literal 0x...", l.number, l.tokens[3].column);
      if ((v & ~width_mask(w)) != 0) fail("width-mismatch", "literal does not fit width", l.number, l.tokens[3].column);
      int id = declare(l.tokens[1], w, NetRole::Wire, l.number);
      GateInstance g;
      g.instance = "const:" + l.tokens[1].text;
      g.kind = GateKind::Const;
      g.literal = v;
      g.output = id;
      g.line = l.number;
      c.gates.push_back(std::move(g));
    } else if (kw == "gate" || kw == "dff") {
      pending.push_back(&l);
    } else if (kw == "circuit") {
      fail("syntax", "nested 'circuit'", l.number, 1);
    } else if (kw == "end") {
      fail("syntax", "content after 'end'", lines[li + 1].number, 1);
    } else {
      fail("syntax", "unknown statement '" + kw + "'", l.number, 1);
    }
  }

  auto lookup = [&](const text::Token& tok, int line, bool allow_invert) -> Operand {
    std::string_view name = tok.text;
    Operand op;
    if (!name.empty() && name[0] == '~') {
      if (!allow_invert) fail("syntax", "inverted operand not allowed here", line, tok.column);
      op.inverted = true;
      name.remove_prefix(1);
    }
    auto it = net_index.find(std::string(name));
    if (it == net_index.end()) fail("undeclared-net", "undeclared net '" + std::string(name) + "'", line, tok.column);
    op.net = it->second;
    return op;
  };

  // Pass 2: registers and gates.
  for (const auto* lp : pending) {
    const auto& l = *lp;
    if (l.tokens[0].text == "dff") {
      if (l.tokens.size() != 4 && l.tokens.size() != 5)
        fail("syntax", "expected 'dff <inst> <q> <d> [init=0x<hex>]'", l.number, 1);
      claim_instance(l.tokens[1], l.number);
      Register r;
      r.instance = l.tokens[1].text;
      r.q = lookup(l.tokens[2], l.number, false).net;
      r.d = lookup(l.tokens[3], l.number, false).net;
      r.line = l.number;
      if (l.tokens.size() == 5) {
        const auto& t = l.tokens[4];
        unsigned long long v = 0;
        if (t.text.rfind("init=", 0) != 0 || !text::parse_hex(std::string_view(t.text).substr(5), v))
          fail("syntax", "expected init=0x<hex>", l.number, t.column);
        r.init = v;
      }
      if (c.width(r.q) != c.width(r.d))
        fail("width-mismatch", "dff q and d widths differ", l.number, l.tokens[3].column);
      if ((r.init & ~width_mask(c.width(r.q))) != 0)
        fail("width-mismatch", "init value does not fit register width", l.number, l.tokens[4].column);
      c.registers.push_back(r);
      continue;
    }
    if (l.tokens.size() < 4) fail("syntax", "expected 'gate <kind> <inst> <out> <in...>'", l.number, 1);
    const auto& ktok = l.tokens[1];
    std::string_view kspec = ktok.text;
    std::string_view kname = kspec.substr(0, kspec.find(':'));
    auto kind = kind_from_name(kname);
    if (!kind || *kind == GateKind::Const)
      fail("unknown-kind", "unknown gate kind '" + std::string(kname) + "'", l.number, ktok.column);
    int pinned_arity = -1;
    for (const auto& a : kAliases)
      if (a.name == kname) pinned_arity = a.arity;
    GateInstance g;
    g.kind = *kind;
    g.line = l.number;
    if (has_param(g.kind)) {
      auto colon = kspec.find(':');
      if (colon == std::string_view::npos || !parse_int(kspec.substr(colon + 1), g.param) || g.param < 0)
        fail("syntax", "kind '" + std::string(kname) + "' needs a parameter, e.g. " + std::string(kname) + ":2",
             l.number, ktok.column);
    } else if (kspec.find(':') != std::string_view::npos) {
      fail("syntax", "kind '" + std::string(kname) + "' takes no parameter", l.number, ktok.column);
    }
    claim_instance(l.tokens[2], l.number);
    g.instance = l.tokens[2].text;
    g.output = lookup(l.tokens[3], l.number, false).net;
    bool invertible = g.kind == GateKind::And || g.kind == GateKind::Or;
    for (size_t t = 4; t < l.tokens.size(); ++t) g.inputs.push_back(lookup(l.tokens[t], l.number, invertible));
    if (pinned_arity >= 0 && static_cast<int>(g.inputs.size()) != pinned_arity)
      fail("arity", "'" + std::string(kname) + "' takes " + std::to_string(pinned_arity) + " inputs", l.number,
           ktok.column);
    c.gates.push_back(std::move(g));
  }

  validate(c);
  return c;
}

Circuit load_circuit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_circuit(ss.str());
}

void validate(Circuit& c) {
  const auto nnets = c.nets.size();
  auto w = [&](int net) { return c.width(net); };

  // Width and arity rules.
  for (const auto& g : c.gates) {
    auto bad = [&](const char* code, const std::string& msg) { fail(code, g.instance + ": " + msg, g.line, 0); };
    const int ow = w(g.output);
    const auto n = g.inputs.size();
    auto in_w = [&](size_t i) { return w(g.inputs[i].net); };
    for (const auto& op : g.inputs)
      if (op.inverted && g.kind != GateKind::And && g.kind != GateKind::Or)
        bad("syntax", "inverted operand only allowed on and/or");
    switch (g.kind) {
      case GateKind::Const:
        if (n != 0) bad("arity", "const takes no inputs");
        break;
      case GateKind::Not:
      case GateKind::Assign:
        if (n != 1) bad("arity", "takes exactly one input");
        if (in_w(0) != ow) bad("width-mismatch", "input and output widths differ");
        break;
      case GateKind::And:
      case GateKind::Or:
      case GateKind::Xor:
        if (n < 2) bad("arity", "needs at least two inputs");
        for (size_t i = 0; i < n; ++i)
          if (in_w(i) != ow) bad("width-mismatch", "bitwise operand widths must equal output width");
        break;
      case GateKind::RAnd:
      case GateKind::ROr:
      case GateKind::RXor:
        if (n != 1) bad("arity", "reduction takes one input");
        if (ow != 1) bad("width-mismatch", "reduction output must be 1 bit");
        break;
      case GateKind::Mux2:
        if (n != 3) bad("arity", "mux2 takes <sel> <a> <b>");
        if (in_w(0) != 1) bad("width-mismatch", "mux2 select must be 1 bit");
        if (in_w(1) != ow || in_w(2) != ow) bad("width-mismatch", "mux2 data widths must equal output width");
        break;
      case GateKind::Eq:
      case GateKind::Lt:
        if (n != 2) bad("arity", "comparison takes two inputs");
        if (in_w(0) != in_w(1)) bad("width-mismatch", "comparison operand widths differ");
        if (ow != 1) bad("width-mismatch", "comparison output must be 1 bit");
        break;
      case GateKind::Add:
      case GateKind::Sub:
        if (n != 2) bad("arity", "takes two inputs");
        if (in_w(0) != ow || in_w(1) != ow) bad("width-mismatch", "operand widths must equal output width");
        break;
      case GateKind::Shl:
      case GateKind::Shr:
        if (n != 1) bad("arity", "shift takes one input");
        if (in_w(0) != ow) bad("width-mismatch", "shift input and output widths differ");
        break;
      case GateKind::Slice:
        if (n != 1) bad("arity", "slice takes one input");
        if (g.param + ow > in_w(0)) bad("width-mismatch", "slice range exceeds input width");
        break;
      case GateKind::Concat: {
        if (n < 1) bad("arity", "concat needs inputs");
        int sum = 0;
        for (size_t i = 0; i < n; ++i) sum += in_w(i);
        if (sum != ow) bad("width-mismatch", "concat widths do not sum to output width");
        break;
      }
      case GateKind::Mul:
        if (n != 2) bad("arity", "mul takes two inputs");
        if (in_w(0) != in_w(1) || ow != 2 * in_w(0)) bad("width-mismatch", "mul needs N x N -> 2N widths");
        break;
    }
  }

  // Drivers.
  std::vector<int> driver_line(nnets, 0);
  auto drive = [&](int net, int line) {
    auto& dl = driver_line[static_cast<size_t>(net)];
    if (dl != 0)
      fail("multiple-drivers", "net '" + c.nets[static_cast<size_t>(net)].name + "' has multiple drivers", line, 0);
    dl = line;
  };
  for (int i : c.inputs) drive(i, c.nets[static_cast<size_t>(i)].line);
  for (const auto& r : c.registers) drive(r.q, r.line);
  for (const auto& g : c.gates) {
    if (c.nets[static_cast<size_t>(g.output)].role == NetRole::Input)
      fail("multiple-drivers", "gate '" + g.instance + "' drives input port", g.line, 0);
    drive(g.output, g.line);
  }
  for (size_t i = 0; i < nnets; ++i)
    if (driver_line[i] == 0) fail("undriven-net", "net '" + c.nets[i].name + "' has no driver", c.nets[i].line, 0);

  // Acyclicity (Kahn over gate dependencies).
  std::vector<int> gate_of_net(nnets, -1);
  for (size_t gi = 0; gi < c.gates.size(); ++gi) gate_of_net[static_cast<size_t>(c.gates[gi].output)] = static_cast<int>(gi);
  std::vector<int> indeg(c.gates.size(), 0);
  std::vector<std::vector<int>> users(c.gates.size());
  for (size_t gi = 0; gi < c.gates.size(); ++gi) {
    for (const auto& op : c.gates[gi].inputs) {
      int src = gate_of_net[static_cast<size_t>(op.net)];
      if (src >= 0) {
        ++indeg[gi];
        users[static_cast<size_t>(src)].push_back(static_cast<int>(gi));
      }
    }
  }
  c.topo_order.clear();
  std::vector<int> ready;
  for (size_t gi = c.gates.size(); gi-- > 0;)
    if (indeg[gi] == 0) ready.push_back(static_cast<int>(gi));
  while (!ready.empty()) {
    int g = ready.back();
    ready.pop_back();
    c.topo_order.push_back(g);
    auto& us = users[static_cast<size_t>(g)];
    for (auto it = us.rbegin(); it != us.rend(); ++it)
      if (--indeg[static_cast<size_t>(*it)] == 0) ready.push_back(*it);
  }
  if (c.topo_order.size() != c.gates.size()) {
    for (size_t gi = 0; gi < c.gates.size(); ++gi)
      if (indeg[gi] > 0)
        fail("combinational-cycle", "gate '" + c.gates[gi].instance + "' is on a combinational cycle",
             c.gates[gi].line, 0);
  }
}

std::string print_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "circuit " << c.name << "\n";
  std::vector<int> const_gate(c.nets.size(), -1);
  for (size_t gi = 0; gi < c.gates.size(); ++gi)
    if (c.gates[gi].kind == GateKind::Const) const_gate[static_cast<size_t>(c.gates[gi].output)] = static_cast<int>(gi);
  for (size_t i = 0; i < c.nets.size(); ++i) {
    const auto& n = c.nets[i];
    if (const_gate[i] >= 0) {
      os << "const " << n.name << " " << n.width << " 0x"
         << text::to_hex(c.gates[static_cast<size_t>(const_gate[i])].literal) << "\n";
      continue;
    }
    const char* kw = n.role == NetRole::Input ? "input" : n.role == NetRole::Output ? "output" : "wire";
    os << kw << " " << n.name << " " << n.width << "\n";
  }
  for (const auto& r : c.registers) {
    os << "dff " << r.instance << " " << c.nets[static_cast<size_t>(r.q)].name << " "
       << c.nets[static_cast<size_t>(r.d)].name;
    if (r.init != 0) os << " init=0x" << text::to_hex(r.init);
    os << "\n";
  }
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::Const) continue;
    os << "gate " << kind_name(g.kind);
    if (g.kind == GateKind::Shl || g.kind == GateKind::Shr || g.kind == GateKind::Slice) os << ":" << g.param;
    os << " " << g.instance << " " << c.nets[static_cast<size_t>(g.output)].name;
    for (const auto& op : g.inputs) os << " " << (op.inverted ? "~" : "") << c.nets[static_cast<size_t>(op.net)].name;
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

WordFrame evaluate_words(const Circuit& c, std::span<const std::uint64_t> inputs,
                         std::span<const std::uint64_t> state) {
  WordFrame f;
  f.values.assign(c.nets.size(), 0);
  for (size_t i = 0; i < c.inputs.size(); ++i) {
    int net = c.inputs[i];
    f.values[static_cast<size_t>(net)] = (i < inputs.size() ? inputs[i] : 0) & width_mask(c.width(net));
  }
  for (size_t r = 0; r < c.registers.size(); ++r) {
    int q = c.registers[r].q;
    f.values[static_cast<size_t>(q)] = (r < state.size() ? state[r] : 0) & width_mask(c.width(q));
  }
  auto& v = f.values;
  for (int gi : c.topo_order) {
    const auto& g = c.gates[static_cast<size_t>(gi)];
    const std::uint64_t m = width_mask(c.width(g.output));
    auto in = [&](size_t i) {
      const auto& op = g.inputs[i];
      std::uint64_t x = v[static_cast<size_t>(op.net)];
      return op.inverted ? (~x & width_mask(c.width(op.net))) : x;
    };
    std::uint64_t r = 0;
    switch (g.kind) {
      case GateKind::Const: r = g.literal; break;
      case GateKind::Not: r = ~in(0); break;
      case GateKind::Assign: r = in(0); break;
      case GateKind::And:
        r = ~std::uint64_t{0};
        for (size_t i = 0; i < g.inputs.size(); ++i) r &= in(i);
        break;
      case GateKind::Or:
        for (size_t i = 0; i < g.inputs.size(); ++i) r |= in(i);
        break;
      case GateKind::Xor:
        for (size_t i = 0; i < g.inputs.size(); ++i) r ^= in(i);
        break;
      case GateKind::RAnd: r = in(0) == width_mask(c.width(g.inputs[0].net)); break;
      case GateKind::ROr: r = in(0) != 0; break;
      case GateKind::RXor: r = static_cast<std::uint64_t>(std::popcount(in(0)) & 1); break;
      case GateKind::Mux2: r = (in(0) & 1) ? in(2) : in(1); break;
      case GateKind::Eq: r = in(0) == in(1); break;
      case GateKind::Lt: r = in(0) < in(1); break;
      case GateKind::Add: r = in(0) + in(1); break;
      case GateKind::Sub: r = in(0) - in(1); break;
      case GateKind::Shl: r = g.param >= 64 ? 0 : in(0) << g.param; break;
      case GateKind::Shr: r = g.param >= 64 ? 0 : in(0) >> g.param; break;
      case GateKind::Slice: r = g.param >= 64 ? 0 : in(0) >> g.param; break;
      case GateKind::Concat: {
        int off = 0;
        for (size_t i = 0; i < g.inputs.size(); ++i) {
          if (off < 64) r |= in(i) << off;
          off += c.width(g.inputs[i].net);
        }
        break;
      }
      case GateKind::Mul: r = in(0) * in(1); break;
    }
    v[static_cast<size_t>(g.output)] = r & m;
  }
  f.next_state.resize(c.registers.size());
  for (size_t r = 0; r < c.registers.size(); ++r) f.next_state[r] = v[static_cast<size_t>(c.registers[r].d)];
  return f;
}

}  // namespace gifpo
