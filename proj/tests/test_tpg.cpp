#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "gifpo/circuit.hpp"
#include "gifpo/coverage.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "gifpo/stuckat.hpp"
#include "gifpo/synth.hpp"
#include "gifpo/tpg.hpp"
#include "json.hpp"
#include "oracle.hpp"

using namespace gifpo;
namespace fs = std::filesystem;

namespace {

GifPoUniverse universe_of(const std::string& name) {
  return build_reduced_universe(elaborate(load_circuit(oracle::circuit(name))));
}

Stimulus ti() { return Stimulus::parse("inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n"); }

fs::path temp_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("gifpo_tpg_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Number of rows with a bit in any kept cycle.
std::size_t covered_by(const std::vector<BitRow>& rows, const std::vector<std::size_t>& keep) {
  std::size_t n = 0;
  for (const auto& r : rows) {
    bool hit = false;
    for (auto t : keep) hit = hit || bit_test(r, t);
    n += hit;
  }
  return n;
}

}  // namespace

TEST_CASE("exhaustive stimulus order") {
  const auto u = universe_of("c1");
  const auto st = gen_exhaustive(u.netlist());
  REQUIRE(st.size() == 8);
  CHECK(st.fields == std::vector<std::string>{"a", "b", "c"});
  for (std::uint64_t i = 0; i < 8; ++i)
    CHECK(st.cycles[i] == std::vector<std::uint64_t>{(i >> 2) & 1, (i >> 1) & 1, i & 1});

  const auto one = elaborate(parse_circuit("circuit t\ninput a 1\noutput y 1\ngate not g y a\nend\n"));
  CHECK(gen_exhaustive(one.netlist).size() == 2);
  CHECK(gen_exhaustive(universe_of("mul8").netlist()).size() == 65536);

  std::string code;
  try {
    gen_exhaustive(universe_of("add16").netlist());
  } catch (const Error& e) {
    code = e.code();
  }
  CHECK(code == "too-wide");
}

TEST_CASE("exhaustive stimulus enumerates register state") {
  const auto e = elaborate(load_circuit(oracle::circuit("b02")));
  const auto st = gen_exhaustive(e.netlist);
  CHECK(st.size() == (1u << e.netlist.pis().size()));
  std::set<std::vector<std::uint64_t>> rows(st.cycles.begin(), st.cycles.end());
  CHECK(rows.size() == st.size());
  CHECK(st.fields.size() == 2);
}

TEST_CASE("random and weighted generators") {
  const auto n = universe_of("add8").netlist();
  const auto a = gen_random(n, 4, 1);
  CHECK(a.size() == 4);
  CHECK(a.cycles == gen_random(n, 4, 1).cycles);
  CHECK(a.cycles != gen_random(n, 4, 2).cycles);
  for (const auto& r : gen_random(n, 100, 9).cycles)
    for (auto v : r) CHECK(v <= 0xff);
  CHECK_THROWS_AS(gen_random(n, 0, 1), Error);

  const double one[] = {1.0};
  for (const auto& r : gen_weighted(n, 10, 3, one).cycles) CHECK(r == std::vector<std::uint64_t>{0xff, 0xff});
  const double zero[] = {0.0};
  for (const auto& r : gen_weighted(n, 10, 3, zero).cycles) CHECK(r == std::vector<std::uint64_t>{0, 0});
  std::vector<double> per(16, 0.0);
  per[0] = 1.0;
  for (const auto& r : gen_weighted(n, 10, 3, per).cycles) CHECK(r == std::vector<std::uint64_t>{1, 0});
  const double bad[] = {0.5, 0.5};
  CHECK_THROWS_AS(gen_weighted(n, 1, 1, bad), Error);
}

TEST_CASE("bitslice windows") {
  const auto n = universe_of("add64").netlist();
  const auto st = gen_bitslice(n, 2);
  CHECK(st.size() == 63 * 16);
  const auto n4 = universe_of("add4").netlist();
  const auto s4 = gen_bitslice(n4, 4);
  // One offset, the full 8-bit space.
  std::set<std::vector<std::uint64_t>> rows(s4.cycles.begin(), s4.cycles.end());
  CHECK(rows.size() == 256);
}

TEST_CASE("greedy selection keeps contributing cycles") {
  const auto u = universe_of("c1");
  const auto ts = greedy_select(u, gen_exhaustive(u.netlist()));
  CHECK(ts.origin == std::vector<std::uint64_t>{0, 1, 2, 4, 6, 7});
  CHECK(ts.covered == 7);
  CHECK(ts.total == 7);

  const auto only = greedy_select(u, ti());
  CHECK(only.size() == 4);

  const auto rep = greedy_select(u, Stimulus::parse("inputs a b c\n1 1 0\n1 1 0\n1 1 0\n"));
  CHECK(rep.size() == 1);
  CHECK(rep.origin == std::vector<std::uint64_t>{0});
}

TEST_CASE("selection reaches the coverage of its source") {
  for (const char* name : {"add4", "mux8", "mul3", "alu4", "b01", "b06"}) {
    CAPTURE(name);
    const auto u = universe_of(name);
    const auto st = gen_random(u.netlist(), 200, 17);
    const auto src = summarize(u, run_coverage(u, st));
    const auto ts = greedy_select(u, st);
    CHECK(ts.covered == src.covered);
    CHECK(summarize(u, run_coverage(u, ts.stimulus)).covered == src.covered);
    // Origins are increasing and point to equal rows of the source.
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) CHECK(ts.origin[i] > ts.origin[i - 1]);
    }
  }
}

TEST_CASE("set cover on a hand-built matrix") {
  // Targets x cycles: cycle 1 covers {0,1,2}, cycle 2 {2,3}, cycle 0 {0},
  // cycle 3 {3}.
  std::vector<BitRow> rows(4);
  bit_set(rows[0], 0);
  bit_set(rows[0], 1);
  bit_set(rows[1], 1);
  bit_set(rows[2], 1);
  bit_set(rows[2], 2);
  bit_set(rows[3], 2);
  bit_set(rows[3], 3);
  CHECK(compact_cycles(rows, 4) == std::vector<std::size_t>{1, 2});
  // Ties go to the earliest cycle.
  std::vector<BitRow> tie(1);
  bit_set(tie[0], 2);
  bit_set(tie[0], 5);
  CHECK(compact_cycles(tie, 6) == std::vector<std::size_t>{2});
  CHECK(compact_cycles({}, 3).empty());
}

TEST_CASE("Ti compacts to three cycles on C1") {
  const auto c1 = gate_netlist_from_circuit(load_circuit(oracle::circuit("c1")));
  TestSet ts;
  ts.stimulus = ti();
  ts.origin = {0, 1, 2, 3};
  const auto out = compact(ts, c1);
  CHECK(out.size() == 3);
  CHECK(out.origin == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(out.covered == 10);
  CHECK(out.total == 10);
  CHECK(out.metric == Metric::StuckAt);
  CHECK(fault_simulate(c1, out.stimulus).detected() == 10);
  // Already minimal: unchanged.
  CHECK(compact(out, c1).stimulus.cycles == out.stimulus.cycles);
}

TEST_CASE("compaction never lowers the targeted coverage") {
  std::mt19937_64 rng(5);
  for (const char* name : {"add4", "mux4w2", "mul3", "alu4", "b02", "b06"}) {
    CAPTURE(name);
    const auto e = elaborate(load_circuit(oracle::circuit(name)));
    const auto u = build_reduced_universe(e);
    const auto gate = lower(e, SynthStyle::parse("aotree"));
    TestSet ts;
    ts.stimulus = gen_random(u.netlist(), 150, rng());
    const auto gif_before = summarize(u, run_coverage(u, ts.stimulus)).covered;
    const auto g = compact(ts, u);
    CHECK(g.size() <= ts.size());
    CHECK(g.covered == gif_before);
    CHECK(summarize(u, run_coverage(u, g.stimulus)).covered == gif_before);

    const auto sa_before = fault_simulate(gate, ts.stimulus).detected();
    const auto s = compact(ts, gate);
    CHECK(s.size() <= ts.size());
    CHECK(s.covered == sa_before);
    CHECK(fault_simulate(gate, s.stimulus).detected() == sa_before);

    // Every kept cycle is needed: removing any one loses a target.
    const auto frames = bind_stimulus(gate, ts.stimulus);
    const auto rows = fault_rows(gate, frames);
    std::vector<std::size_t> keep(s.origin.begin(), s.origin.end());
    const auto full = covered_by(rows, keep);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      auto fewer = keep;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
      CHECK(covered_by(rows, fewer) < full);
    }
  }
}

TEST_CASE("export writes a stimulus and a manifest") {
  const auto dir = temp_dir("export");
  TestSet ts;
  ts.stimulus = ti();
  ts.origin = {0, 1, 2, 3};
  ts.covered = 7;
  ts.total = 7;
  export_test_set(ts, dir / "ti");
  const auto back = Stimulus::load(dir / "ti.stim");
  CHECK(back.cycles == ts.stimulus.cycles);
  CHECK(back.fields == ts.stimulus.fields);
  std::ifstream in(dir / "ti.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["metric"] == "gifpo");
  CHECK(j["cycles"] == 4);
  CHECK(j["origin"] == nlohmann::json::array({0, 1, 2, 3}));
  CHECK(j["coverage"] == 100.0);

  TestSet empty;
  empty.stimulus.fields = {"a", "b", "c"};
  export_test_set(empty, dir / "empty", "json");
  CHECK_FALSE(fs::exists(dir / "empty.stim"));
  std::ifstream ein(dir / "empty.json");
  CHECK(nlohmann::json::parse(ein)["coverage"] == 0.0);

  CHECK_THROWS_AS(export_test_set(ts, dir / "x", "wgl"), Error);
  CHECK(metric_from_name("stuckat") == Metric::StuckAt);
  CHECK_THROWS_AS(metric_from_name("path"), Error);
  fs::remove_all(dir);
}

TEST_CASE("pipeline artifacts are deterministic") {
  const auto u = universe_of("alu4");
  const auto st = gen_random(u.netlist(), 500, 42);
  const auto a = greedy_select(u, st);
  const auto b = greedy_select(u, st);
  CHECK(test_set_manifest(a) == test_set_manifest(b));
  CHECK(a.stimulus.serialize() == b.stimulus.serialize());
  CHECK(test_set_manifest(compact(a, u)) == test_set_manifest(compact(b, u)));
}
