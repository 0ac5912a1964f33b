#include <random>

#include "doctest.h"
#include "gifpo/circuit.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "oracle.hpp"

using namespace gifpo;

namespace {

std::string parse_code(const std::string& text) {
  try {
    parse_circuit(text);
  } catch (const ParseError& e) {
    return e.code();
  }
  return "ok";
}

const char* kBundled[] = {"c1",  "c2",   "add1",   "add2", "add4", "add8", "add16", "add32", "add64", "mul3",
                          "mul4", "mul8", "mux4", "mux8", "mux4w2", "alu4", "b01",  "b02",   "b06"};

}  // namespace

TEST_CASE("parse c1") {
  const auto c = load_circuit(oracle::circuit("c1"));
  CHECK(c.name == "c1");
  CHECK(c.inputs.size() == 3);
  CHECK(c.outputs.size() == 1);
  CHECK(c.gates.size() == 2);
  CHECK(c.input_bits() == 3);
  CHECK(c.state_bits() == 0);
  CHECK(c.gates[0].kind == GateKind::And);
  CHECK(c.gates[1].kind == GateKind::Xor);
}

TEST_CASE("parse errors carry codes and positions") {
  const std::string head = "circuit t\ninput a 2\ninput b 2\noutput y 2\n";
  CHECK(parse_code(head + "gate and g y a b\nend\n") == "ok");
  CHECK(parse_code("gate and g y a b\n") == "syntax");
  CHECK(parse_code(head + "gate nand g y a b\nend\n") == "unknown-kind");
  CHECK(parse_code(head + "gate not g y a b\nend\n") == "arity");
  CHECK(parse_code("circuit t\ninput a 2\ninput b 3\noutput y 2\ngate and g y a b\nend\n") == "width-mismatch");
  CHECK(parse_code(head + "gate and g y a q\nend\n") == "undeclared-net");
  CHECK(parse_code(head + "input a 1\ngate and g y a b\nend\n") == "duplicate-name");
  CHECK(parse_code(head + "gate and g y a b\ngate or h y a b\nend\n") == "multiple-drivers");
  CHECK(parse_code(head + "end\n") == "undriven-net");
  CHECK(parse_code("circuit t\ninput a 1\noutput y 1\nwire p 1\nwire q 1\ngate and g1 p a q\ngate and g2 q a p\n"
                   "gate assign g3 y p\nend\n") == "combinational-cycle");
  try {
    parse_circuit(head + "gate and g y a q\nend\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(e.column() > 0);
    CHECK(std::string(e.what()).find("error[undeclared-net]") != std::string::npos);
  }
}

TEST_CASE("register loop through a dff is not a cycle") {
  CHECK(parse_code("circuit t\ninput a 1\noutput y 1\nwire q 1\nwire d 1\ngate xor g d a q\ngate assign o y q\n"
                   "dff r q d init=0x1\nend\n") == "ok");
}

TEST_CASE("print/parse round trip on bundled circuits") {
  for (const char* name : kBundled) {
    CAPTURE(name);
    const auto c = load_circuit(oracle::circuit(name));
    const auto text = print_circuit(c);
    const auto again = parse_circuit(text);
    CHECK(print_circuit(again) == text);
    CHECK(again.gates.size() == c.gates.size());
    CHECK(again.registers.size() == c.registers.size());
  }
}

TEST_CASE("word semantics of arithmetic gates") {
  const auto add = load_circuit(oracle::circuit("add8"));
  const auto mul = load_circuit(oracle::circuit("mul4"));
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t a = rng() & 0xff, b = rng() & 0xff;
    std::vector<std::uint64_t> in{a, b};
    const auto f = evaluate_words(add, in, {});
    CHECK(f.values[static_cast<std::size_t>(add.outputs[0])] == ((a + b) & 0xff));
    std::vector<std::uint64_t> in4{a & 15, b & 15};
    const auto g = evaluate_words(mul, in4, {});
    CHECK(g.values[static_cast<std::size_t>(mul.outputs[0])] == (a & 15) * (b & 15));
  }
}

TEST_CASE("elaboration matches word semantics") {
  for (const char* name : kBundled) {
    const auto c = load_circuit(oracle::circuit(name));
    if (c.input_bits() + c.state_bits() > 16) continue;
    CAPTURE(name);
    const auto e = elaborate(c);
    CHECK_FALSE(check_elaboration(c, e).has_value());
    for (std::size_t ci = 0; ci < e.netlist.cells().size(); ++ci) {
      const auto& cell = e.netlist.cells()[ci];
      if (cell.source >= 0) CHECK(static_cast<std::size_t>(cell.source) < e.source_gates.size());
    }
  }
}

TEST_CASE("elaborated adder against the scalar oracle") {
  const auto c = load_circuit(oracle::circuit("add4"));
  const auto e = elaborate(c);
  const auto& n = e.netlist;
  REQUIRE(n.pis().size() == 8);
  REQUIRE(n.pos().size() == 4);
  // Field a occupies the first four PIs, LSB first.
  for (const auto& v : oracle::all_vectors(n)) {
    unsigned a = 0, b = 0;
    for (int k = 0; k < 4; ++k) {
      a |= static_cast<unsigned>(v[static_cast<std::size_t>(k)]) << k;
      b |= static_cast<unsigned>(v[static_cast<std::size_t>(4 + k)]) << k;
    }
    const auto r = oracle::simulate(n, v);
    unsigned s = 0;
    for (int k = 0; k < 4; ++k) s |= static_cast<unsigned>(r.po[static_cast<std::size_t>(k)]) << k;
    CHECK(s == ((a + b) & 15));
  }
}

TEST_CASE("adder decomposition: HA at bit 0 then FAs") {
  const auto e = elaborate(load_circuit(oracle::circuit("add8")));
  int ha = 0, fa = 0;
  for (const auto& c : e.netlist.cells()) {
    ha += c.kind == CellKind::Ha;
    fa += c.kind == CellKind::Fa;
  }
  CHECK(ha == 1);
  CHECK(fa == 7);
}

TEST_CASE("sequential designs expose state as PIs and next state as POs") {
  const auto c = load_circuit(oracle::circuit("b01"));
  const auto e = elaborate(c);
  CHECK(e.netlist.num_state_bits() == 4);
  CHECK(e.netlist.num_input_bits() == 2);
  CHECK(e.netlist.pos().size() == 2 + 4);
}
