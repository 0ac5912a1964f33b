#include <algorithm>
#include <set>

#include "doctest.h"
#include "gifpo/circuit.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "gifpo/stuckat.hpp"
#include "gifpo/synth.hpp"
#include "oracle.hpp"

using namespace gifpo;

namespace {

ElaboratedCircuit elab(const std::string& name) { return elaborate(load_circuit(oracle::circuit(name))); }

// Same PI/PO signature and the same PO values on every assignment, by the
// scalar oracle.
bool oracle_equivalent(const Netlist& a, const Netlist& b) {
  if (a.pis().size() != b.pis().size() || a.po_names() != b.po_names()) return false;
  for (const auto& v : oracle::all_vectors(a))
    if (oracle::simulate(a, v).po != oracle::simulate(b, v).po) return false;
  return true;
}

std::string strip_prefix(std::string text, const std::string& prefix) {
  for (std::size_t pos; (pos = text.find(prefix)) != std::string::npos;) text.erase(pos, prefix.size());
  return text;
}

const char* kSmall[] = {"c1", "add2", "add4", "mux4", "mux4w2", "mul3", "alu4", "b01", "b02", "b06"};

}  // namespace

TEST_CASE("every style is equivalent to its source") {
  for (const char* name : kSmall) {
    const auto e = elab(name);
    for (const char* style : {"ripple", "two-level", "aotree", "rewrite"}) {
      CAPTURE(name);
      CAPTURE(style);
      const auto st = SynthStyle::parse(style, 7, 12);
      Netlist n;
      try {
        n = lower(e, st);
      } catch (const Error& err) {
        CHECK(err.code() == "cone-too-wide");
        continue;
      }
      CHECK(n.is_gate_level());
      CHECK(oracle_equivalent(e.netlist, n));
      CHECK(n.num_state_bits() == e.netlist.num_state_bits());
    }
  }
}

TEST_CASE("style names") {
  CHECK(SynthStyle::parse("RIPPLE").kind == StyleKind::Ripple);
  CHECK(SynthStyle::parse("Two-Level").kind == StyleKind::TwoLevel);
  CHECK(SynthStyle::parse("rewrite", 3, 9).label() == "REWRITE(seed=3,steps=9)");
  CHECK(SynthStyle::parse("aotree").prefix() == "aotree");
  CHECK_THROWS_AS(SynthStyle::parse("espresso"), Error);
}

TEST_CASE("TWO-LEVEL of C1 has the C2 structure") {
  const auto n = lower(elab("c1"), SynthStyle::parse("two-level"));
  CHECK(n.num_nets() == 7);
  std::multiset<CellKind> kinds;
  for (const auto& c : n.cells()) kinds.insert(c.kind);
  CHECK(kinds.count(CellKind::And) == 3);
  CHECK(kinds.count(CellKind::Or) == 1);
  CHECK(kinds.size() == 4);
  const auto c2 = gate_netlist_from_circuit(load_circuit(oracle::circuit("c2")));
  CHECK(oracle_equivalent(n, c2));
}

TEST_CASE("TWO-LEVEL refuses wide cones") {
  std::string code;
  try {
    lower(elab("add64"), SynthStyle::parse("two-level"));
  } catch (const Error& e) {
    code = e.code();
  }
  CHECK(code == "cone-too-wide");
}

TEST_CASE("zero-step REWRITE equals RIPPLE") {
  for (const char* name : {"c1", "add4", "b06"}) {
    CAPTURE(name);
    const auto e = elab(name);
    const auto r = print_gate_netlist(lower(e, SynthStyle{}));
    const auto w = print_gate_netlist(lower(e, SynthStyle::parse("rewrite", 5, 0)));
    CHECK(strip_prefix(strip_prefix(w, "rewrite/"), "ripple/") == strip_prefix(r, "ripple/"));
  }
}

TEST_CASE("REWRITE is deterministic in seed and steps") {
  const auto e = elab("alu4");
  std::vector<std::string> log1, log2;
  const auto a = print_gate_netlist(lower(e, SynthStyle::parse("rewrite", 4, 30), &log1));
  const auto b = print_gate_netlist(lower(e, SynthStyle::parse("rewrite", 4, 30), &log2));
  CHECK(a == b);
  CHECK(log1 == log2);
  CHECK(log1.size() == 30);
  const auto c = print_gate_netlist(lower(e, SynthStyle::parse("rewrite", 5, 30)));
  CHECK(a != c);
}

TEST_CASE("cell names carry style and source gate") {
  const auto n = lower(elab("add4"), SynthStyle::parse("aotree"));
  REQUIRE_FALSE(n.cells().empty());
  for (const auto& c : n.cells()) CHECK(c.name.rfind("aotree/u_add/", 0) == 0);
}

TEST_CASE("variant suites") {
  SUBCASE("c1, three variants") {
    std::vector<std::string> labels;
    for (const auto& v : variant_suite(elab("c1"), 3, 1)) labels.push_back(v.style.prefix());
    CHECK(labels == std::vector<std::string>{"ripple", "two-level", "rewrite"});
  }
  SUBCASE("add4, five distinct checked variants") {
    const auto e = elab("add4");
    const auto vs = variant_suite(e, 5, 1);
    REQUIRE(vs.size() == 5);
    std::set<std::string> texts;
    std::set<StyleKind> kinds;
    for (const auto& v : vs) {
      CHECK(v.checked);
      CHECK(oracle_equivalent(e.netlist, v.netlist));
      texts.insert(strip_prefix(strip_prefix(strip_prefix(strip_prefix(print_gate_netlist(v.netlist), "ripple/"),
                                                                        "rewrite/"),
                                                           "aotree/"),
                                              "two-level/"));
      kinds.insert(v.style.kind);
      if (v.style.kind == StyleKind::Rewrite) {
        const bool dup = std::any_of(v.rewrites.begin(), v.rewrites.end(),
                                     [](const std::string& r) { return r.rfind("duplicate-driver", 0) == 0; });
        CHECK(dup);
      }
    }
    CHECK(texts.size() == 5);
    CHECK(kinds.size() == 4);
  }
  SUBCASE("wide circuits skip TWO-LEVEL") {
    const auto vs = variant_suite(elab("add32"), 3, 1);
    REQUIRE(vs.size() == 3);
    for (const auto& v : vs) CHECK(v.style.kind != StyleKind::TwoLevel);
  }
}

TEST_CASE("duplicated drivers appear as independent nets") {
  const auto e = elab("add4");
  std::vector<std::string> log;
  const auto n = lower(e, SynthStyle::parse("rewrite", 1, default_rewrite_steps(lower(e, SynthStyle{}))), &log);
  std::string target;
  for (const auto& r : log)
    if (r.rfind("duplicate-driver ", 0) == 0) target = r.substr(17);
  REQUIRE_FALSE(target.empty());
  // Two cells with the same kind, inputs and bubbles driving different nets.
  std::size_t twins = 0;
  for (std::size_t i = 0; i < n.cells().size(); ++i)
    for (std::size_t j = i + 1; j < n.cells().size(); ++j) {
      const auto& a = n.cells()[i];
      const auto& b = n.cells()[j];
      if (a.kind == b.kind && a.in == b.in && a.inv == b.inv && a.out != b.out) ++twins;
    }
  CHECK(twins >= 1);
}
