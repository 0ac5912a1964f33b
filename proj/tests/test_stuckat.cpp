#include <set>

#include "doctest.h"
#include "gifpo/circuit.hpp"
#include "gifpo/coverage.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "gifpo/stuckat.hpp"
#include "gifpo/synth.hpp"
#include "gifpo/tpg.hpp"
#include "oracle.hpp"

using namespace gifpo;

namespace {

Netlist gate_of(const std::string& name) { return gate_netlist_from_circuit(load_circuit(oracle::circuit(name))); }

Netlist ripple_of(const std::string& name) {
  return lower(elaborate(load_circuit(oracle::circuit(name))), SynthStyle{});
}

const Stimulus& ti() {
  static const Stimulus st = Stimulus::parse("inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n");
  return st;
}

// Faults detected in each cycle (not only first detections).
std::vector<std::set<std::string>> per_cycle(const Netlist& n, const Stimulus& st) {
  const auto frames = bind_stimulus(n, st);
  const auto rows = fault_rows(n, frames);
  const auto faults = enumerate_stuckat(n);
  std::vector<std::set<std::string>> out(frames.frames);
  for (std::size_t f = 0; f < faults.size(); ++f)
    for (std::size_t t = 0; t < frames.frames; ++t)
      if (bit_test(rows[f], t)) out[t].insert(fault_name(n, faults[f]));
  return out;
}

std::vector<std::set<std::string>> oracle_per_cycle(const Netlist& n, const Stimulus& st) {
  const auto frames = bind_stimulus(n, st);
  std::vector<std::set<std::string>> out(frames.frames);
  for (std::size_t t = 0; t < frames.frames; ++t) {
    const auto bits = frames.frame(t);
    std::vector<int> v(bits.begin(), bits.end());
    const auto good = oracle::simulate(n, v);
    for (NetId s = 0; s < n.num_nets(); ++s)
      for (int val : {0, 1})
        if (oracle::stuck_detected(n, v, good, s, val)) out[t].insert(n.net_name(s) + "-" + std::to_string(val));
  }
  return out;
}

}  // namespace

TEST_CASE("fault list covers both polarities of every net") {
  const auto n = gate_of("c1");
  const auto f = enumerate_stuckat(n);
  REQUIRE(f.size() == 10);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f[i].net == i / 2);
    CHECK(f[i].value == (i % 2 == 1));
  }
  CHECK(fault_name(n, f[1]) == "a-1");
}

TEST_CASE("C1 under Ti: all faults, table detections") {
  const auto n = gate_of("c1");
  const auto r = fault_simulate(n, ti());
  CHECK(r.faults.size() == 10);
  CHECK(r.detected() == 10);
  CHECK(r.percent() == 100.0);
  const std::vector<std::set<std::string>> expect = {{"a-1", "c-1", "d-1", "x-1"},
                                                     {"b-1", "c-0", "d-1", "x-0"},
                                                     {"a-0", "b-0", "c-1", "d-0", "x-0"},
                                                     {"a-0", "b-0", "c-0", "d-0", "x-1"}};
  CHECK(per_cycle(n, ti()) == expect);
  CHECK(oracle_per_cycle(n, ti()) == expect);
}

TEST_CASE("C2 under Ti: all faults, table detections") {
  const auto n = gate_of("c2");
  const auto r = fault_simulate(n, ti());
  CHECK(r.faults.size() == 14);
  CHECK(r.detected() == 14);
  const auto got = per_cycle(n, ti());
  CHECK(got == oracle_per_cycle(n, ti()));
  CHECK(got[0] == std::set<std::string>{"a-1", "c-1", "e-1", "g-1", "x-1"});
  CHECK(got[1] == std::set<std::string>{"b-1", "c-0", "f-1", "g-0", "x-0"});
  CHECK(got[2] == std::set<std::string>{"a-0", "b-0", "c-1", "e-0", "x-0"});
  // The published row for (1,1,1) omits a-0 and b-0; both do flip x there
  // (f drops, g rises).
  CHECK(got[3] == std::set<std::string>{"a-0", "b-0", "c-0", "e-1", "f-0", "g-1", "x-1"});
}

TEST_CASE("first detections and the curve") {
  const auto n = gate_of("c1");
  const auto r = fault_simulate(n, ti());
  CHECK(r.curve() == std::vector<std::uint64_t>{4, 7, 10, 10});
  CHECK(r.detected_in(3).empty());
  std::set<std::string> second;
  for (auto f : r.detected_in(1)) second.insert(fault_name(n, r.faults[f]));
  CHECK(second == std::set<std::string>{"b-1", "c-0", "x-0"});
}

TEST_CASE("fault simulation equals the scalar oracle") {
  for (const char* name : {"add4", "mux4", "mul3", "b01", "b06"}) {
    CAPTURE(name);
    const auto n = ripple_of(name);
    const auto st = gen_random(n, 40, 5);
    const auto got = per_cycle(n, st);
    const auto exp = oracle_per_cycle(n, st);
    CHECK(got == exp);
    const auto r = fault_simulate(n, st);
    std::set<std::string> any;
    for (const auto& s : exp) any.insert(s.begin(), s.end());
    CHECK(r.detected() == any.size());
    CHECK(fault_simulate(n, st, {1, 1}).first_cycle == r.first_cycle);
    CHECK(fault_simulate(n, st, {64, 3}).first_cycle == r.first_cycle);
  }
}

TEST_CASE("exhaustive simulation marks exactly the undetectable faults") {
  for (const char* name : {"c2", "add2", "mux4", "b02", "alu4"}) {
    CAPTURE(name);
    const auto n = ripple_of(name);
    const auto r = exhaustive_fault_simulate(n);
    std::vector<char> seen(r.faults.size(), 0);
    for (const auto& v : oracle::all_vectors(n)) {
      const auto good = oracle::simulate(n, v);
      for (std::size_t f = 0; f < r.faults.size(); ++f)
        if (!seen[f] && oracle::stuck_detected(n, v, good, r.faults[f].net, r.faults[f].value)) seen[f] = 1;
    }
    for (std::size_t f = 0; f < r.faults.size(); ++f) {
      CAPTURE(fault_name(n, r.faults[f]));
      CHECK((r.status[f] == FaultStatus::Untestable) == !seen[f]);
    }
  }
}

TEST_CASE("exhaustive equivalence finds a counterexample") {
  const auto a = gate_of("c1");
  const auto b = gate_of("c2");
  CHECK_FALSE(exhaustive_equivalence(a, b).has_value());
  const auto c = parse_circuit("circuit c1\ninput a 1\ninput b 1\ninput c 1\noutput x 1\nwire d 1\n"
                               "gate or g_and d a b\ngate xor g_xor x d c\nend\n");
  const auto cex = exhaustive_equivalence(a, gate_netlist_from_circuit(c));
  REQUIRE(cex.has_value());
  CHECK(cex->differing_pos == std::vector<std::string>{"x"});
  // a != b is where AND and OR disagree.
  CHECK(cex->pi_bits[0] != cex->pi_bits[1]);
  CHECK_FALSE(cex->describe(a).empty());
}

TEST_CASE("tying a testable fault is rejected") {
  const auto n = gate_of("c1");
  const StuckAtFault f{*n.find_net("d"), false};
  std::string code;
  try {
    remove_redundant(n, std::vector<StuckAtFault>{f});
  } catch (const Error& e) {
    code = e.code();
  }
  CHECK(code == "equivalence");
}

TEST_CASE("redundancy removal leaves an equivalent, fully testable netlist") {
  for (const char* name : {"b06", "mul3", "alu4"}) {
    CAPTURE(name);
    const auto n = ripple_of(name);
    const auto before = exhaustive_fault_simulate(n);
    const auto red = remove_all_redundancy(n);
    CHECK_FALSE(exhaustive_equivalence(n, red.netlist).has_value());
    const auto after = exhaustive_fault_simulate(red.netlist);
    CHECK(after.untestable() == 0);
    if (before.untestable() > 0) CHECK_FALSE(red.tied.empty());
    CHECK(red.netlist.num_nets() <= n.num_nets());
  }
}

TEST_CASE("gate netlist text round trip") {
  const auto n = ripple_of("add4");
  const auto text = print_gate_netlist(n);
  const auto back = gate_netlist_from_circuit(parse_circuit(text));
  CHECK(back.num_nets() == n.num_nets());
  CHECK_FALSE(exhaustive_equivalence(n, back).has_value());
  CHECK(print_gate_netlist(back) == text);
}
