// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gifpo/circuit.hpp"
#include "gifpo/coverage.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "gifpo/gif.hpp"
#include "gifpo/stuckat.hpp"
#include "gifpo/synth.hpp"
#include "gifpo/tpg.hpp"
#include "gifpo/workbench.hpp"
#include "oracle.hpp"

using namespace gifpo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    pass = false;
    notes.push_back("FAIL " + why);
  }
  void note(const std::string& s) { notes.push_back(s); }
  void expect(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

std::vector<std::string> bundled() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(GIFPO_TEST_CIRCUITS))
    if (e.path().extension() == ".gnl") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

ElaboratedCircuit elab(const std::string& name) { return elaborate(load_circuit(oracle::circuit(name))); }

// Stimulus the report flow generates for a circuit.
Stimulus generated_stimulus(const Netlist& n, std::string* source = nullptr) {
  if (n.pis().size() <= 20) {
    if (source) *source = "exhaustive";
    return gen_exhaustive(n);
  }
  if (n.num_state_bits() == 0) {
    if (source) *source = "bitslice";
    return gen_bitslice(n, 2);
  }
  if (source) *source = "random";
  return gen_random(n, 1000, 1);
}

std::string join(const std::vector<std::string>& v, std::size_t limit = 6) {
  std::string s;
  for (std::size_t i = 0; i < v.size() && i < limit; ++i) s += (i ? ", " : "") + v[i];
  if (v.size() > limit) s += ", ...";
  return s;
}

// ---- 1 ---------------------------------------------------------------------

Outcome two_input_gates() {
  Outcome o;
  struct Row {
    std::uint32_t m;
    bool alpha;
    std::uint32_t members;
    const char* label;
  };
  auto check = [&](CellKind kind, const char* name, const std::vector<Row>& rows, std::size_t faults) {
    const auto cls = enumerate_gifs(kind, 2);
    const auto labels = gif_labels(kind, 2);
    o.expect(cls.size() == rows.size(), fmt("%s: %zu classes, expected %zu", name, cls.size(), rows.size()));
    o.expect(enumerate_gif_faults(kind, 2).size() == faults, fmt("%s: member fault count", name));
    for (std::size_t i = 0; i < std::min(cls.size(), rows.size()); ++i) {
      const auto& c = cls[i];
      const auto& r = rows[i];
      o.expect(c.go == 0 && c.minterm == r.m && c.alpha == r.alpha && c.members == r.members && labels[i] == r.label,
               fmt("%s class %zu: m=%s alpha=%d label '%s'", name, i, minterm_string(c.minterm, 2).c_str(),
                   int(c.alpha), labels[i].c_str()));
    }
    o.note(fmt("%s: %zu classes / %zu member faults", name, cls.size(), enumerate_gif_faults(kind, 2).size()));
  };
  // Bit p of members is pin p (A = 0, B = 1).
  check(CellKind::And, "AND2", {{0b01, false, 0b01, "A1"}, {0b10, false, 0b10, "B1"}, {0b11, true, 0b11, "A2, B2"}},
        4);
  check(CellKind::Xor, "XOR2",
        {{0b00, false, 0b11, "A1, B1"},
         {0b01, true, 0b11, "A2, B2"},
         {0b10, true, 0b11, "A3, B3"},
         {0b11, false, 0b11, "A4, B4"}},
        8);
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome adder_cells() {
  Outcome o;
  struct Row {
    int go;
    const char* m;
    bool alpha;
    const char* label;
  };
  auto check = [&](CellKind kind, int arity, const char* name, const std::vector<Row>& rows) {
    const auto cls = enumerate_gifs(kind, arity);
    const auto labels = gif_labels(kind, arity);
    int s = 0, co = 0;
    for (const auto& c : cls) (c.go == 0 ? s : co)++;
    o.note(fmt("%s: %d S-classes + %d CO-classes", name, s, co));
    o.expect(cls.size() == rows.size(), fmt("%s: %zu classes, expected %zu", name, cls.size(), rows.size()));
    for (std::size_t i = 0; i < std::min(cls.size(), rows.size()); ++i) {
      const auto& c = cls[i];
      const auto& r = rows[i];
      o.expect(c.go == r.go && minterm_string(c.minterm, arity) == r.m && c.alpha == r.alpha && labels[i] == r.label,
               fmt("%s class %zu: go=%d m=%s label '%s', table '%s'", name, i, c.go,
                   minterm_string(c.minterm, arity).c_str(), labels[i].c_str(), r.label));
    }
  };
  // The table prints "A1, B2" for HA row 01 and "A1, B2, C2" for FA row
  // 001; every other row (and the per-pin counters) give A2 there.
  check(CellKind::Ha, 2, "HA",
        {{0, "00", false, "A1, B1"},
         {0, "01", true, "A2, B2"},
         {0, "10", true, "A3, B3"},
         {0, "11", false, "A4, B4"},
         {1, "01", false, "A5"},
         {1, "10", false, "B5"},
         {1, "11", true, "A6, B6"}});
  check(CellKind::Fa, 3, "FA",
        {{0, "000", false, "A1, B1, C1"},  {0, "001", true, "A2, B2, C2"},  {0, "010", true, "A3, B3, C3"},
         {0, "011", false, "A4, B4, C4"},  {0, "100", true, "A5, B5, C5"},  {0, "101", false, "A6, B6, C6"},
         {0, "110", false, "A7, B7, C7"},  {0, "111", true, "A8, B8, C8"},  {1, "001", false, "A9, C9"},
         {1, "010", false, "B9, C10"},     {1, "011", true, "A10, B10"},    {1, "100", false, "A11, B11"},
         {1, "101", true, "B12, C11"},     {1, "110", true, "A12, C12"}});
  o.note("HA row 01 / FA row 001 compared with A2 (table prints A1)");
  return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome example_circuits() {
  Outcome o;
  const auto ti = Stimulus::parse("inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n");
  const auto u = build_reduced_universe(elab("c1"));
  const auto s = summarize(u, run_coverage(u, ti));
  o.note(fmt("C1 GIF-PO %zu/%zu", s.covered, s.open));
  o.expect(s.covered == 7 && s.open == 7, "C1 Ti GIF-PO coverage");

  using Sets = std::vector<std::set<std::string>>;
  auto per_cycle = [&](const Netlist& n) {
    const auto frames = bind_stimulus(n, ti);
    const auto rows = fault_rows(n, frames);
    const auto faults = enumerate_stuckat(n);
    Sets out(frames.frames);
    for (std::size_t f = 0; f < faults.size(); ++f)
      for (std::size_t t = 0; t < frames.frames; ++t)
        if (bit_test(rows[f], t)) out[t].insert(fault_name(n, faults[f]));
    return out;
  };
  auto compare = [&](const char* name, const Netlist& n, std::size_t faults, const Sets& table) {
    const auto r = fault_simulate(n, ti);
    o.note(fmt("%s stuck-at %zu/%zu", name, r.detected(), r.faults.size()));
    o.expect(r.faults.size() == faults && r.detected() == faults, fmt("%s stuck-at count", name));
    const auto got = per_cycle(n);
    for (std::size_t t = 0; t < table.size(); ++t) {
      if (got[t] == table[t]) continue;
      std::vector<std::string> extra, missing;
      std::set_difference(got[t].begin(), got[t].end(), table[t].begin(), table[t].end(), std::back_inserter(extra));
      std::set_difference(table[t].begin(), table[t].end(), got[t].begin(), got[t].end(),
                          std::back_inserter(missing));
      o.fail(fmt("%s cycle %zu differs from the table: extra {%s} missing {%s}", name, t + 1, join(extra).c_str(),
                 join(missing).c_str()));
    }
  };
  compare("C1", gate_netlist_from_circuit(load_circuit(oracle::circuit("c1"))), 10,
          {{"a-1", "c-1", "d-1", "x-1"},
           {"b-1", "c-0", "d-1", "x-0"},
           {"a-0", "b-0", "c-1", "d-0", "x-0"},
           {"a-0", "b-0", "c-0", "d-0", "x-1"}});
  // Table rows as published (x' is the C2 output, here x).
  const auto c2 = gate_netlist_from_circuit(load_circuit(oracle::circuit("c2")));
  compare("C2", c2, 14,
          {{"a-1", "c-1", "e-1", "g-1", "x-1"},
           {"b-1", "c-0", "f-1", "g-0", "x-0"},
           {"a-0", "b-0", "c-1", "e-0", "x-0"},
           {"c-0", "e-1", "f-0", "g-1", "x-1"}});
  // a and b are primary inputs: a-0 at (1,1,1) gives x = 0&1 ^ 1 = 1 != 0
  // in every implementation of x = (a & b) ^ c.
  for (const char* pi : {"a", "b"}) {
    std::vector<std::uint8_t> bits{1, 1, 1};
    const auto good = evaluate_frame(c2, bits);
    const auto bad = evaluate_frame(c2, bits, Force{*c2.find_net(pi), false});
    if (good.po != bad.po) o.note(fmt("C2 (1,1,1): %s-0 flips x (forced evaluation)", pi));
  }
  return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome adder_counts() {
  Outcome o;
  for (int n : {2, 4, 8, 16, 32, 64}) {
    const auto u = build_reduced_universe(elab("add" + std::to_string(n)));
    const std::size_t closed = 4 + 11 * std::size_t(n - 1) + 3 * std::size_t(n - 2) * std::size_t(n - 1);
    o.expect(u.size() == closed, fmt("add%d: %zu points, closed form %zu", n, u.size(), closed));
    if (n == 64) {
      o.note(fmt("add64: %zu points (closed form %zu)", u.size(), closed));
      o.expect(u.size() == 12415, "add64 != 12415");
      const auto db = run_coverage(u, gen_bitslice(u.netlist(), 2));
      const auto redundant = u.size() - db.covered_count();
      o.note(fmt("add64 bitslice: %zu covered, %zu redundant", db.covered_count(), redundant));
      o.expect(redundant == 0, "add64 has uncovered points");
    }
  }
  return o;
}

// ---- 5 ---------------------------------------------------------------------

// Test sets that reach 100% GIF-PO on the auto-marked universe.
std::vector<std::pair<std::string, Stimulus>> full_coverage_sets(const GifPoUniverse& u, const FrameSet& ex) {
  std::vector<std::pair<std::string, Stimulus>> out;
  const auto ex_st = frames_to_stimulus(u.netlist(), ex);
  const auto natural = greedy_select(u, ex_st);
  out.emplace_back("greedy", natural.stimulus);
  out.emplace_back("compact", compact(natural, u).stimulus);
  for (std::uint64_t seed : {1, 2, 3}) {
    std::vector<std::size_t> order(ex.frames);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
    out.emplace_back("shuffled-" + std::to_string(seed),
                     greedy_select(u, frames_to_stimulus(u.netlist(), ex, order)).stimulus);
  }
  return out;
}

Outcome central_claim(std::vector<std::string>& violations_out) {
  Outcome o;
  std::size_t circuits = 0, variants = 0, sets = 0, violations_a = 0, violations_b = 0;
  struct Agg {
    std::size_t sets = 0, violating = 0, max_a = 0, max_b = 0;
    std::string example;
  };
  std::map<std::string, Agg> per_variant;
  for (const auto& name : bundled()) {
    const auto e = elab(name);
    if (e.netlist.pis().size() > 16) continue;
    ++circuits;
    const auto u0 = build_reduced_universe(e);
    const auto ex = FrameSet::exhaustive(u0.netlist());
    const auto u = mark_unreachable_auto(u0, run_coverage(u0, ex).covered_mask());
    const auto tsets = full_coverage_sets(u, ex);
    for (const auto& [label, st] : tsets) {
      const auto s = summarize(u, run_coverage(u, st));
      o.expect(s.covered == s.open, name + " " + label + " does not reach 100% GIF-PO");
    }
    const auto suite = variant_suite(e, 5, 1);
    o.expect(suite.size() >= 5, name + ": fewer than 5 variants");
    for (const auto& v : suite) {
      ++variants;
      // Measure A: the variant as synthesized, untestable faults excluded.
      const auto ex_fs = exhaustive_fault_simulate(v.netlist);
      // Measure B: after tying every redundant fault.
      const auto red = remove_all_redundancy(v.netlist);
      for (const auto& [label, st] : tsets) {
        ++sets;
        const auto a = fault_simulate(v.netlist, st);
        std::vector<std::string> missed;
        for (std::size_t f = 0; f < a.faults.size(); ++f)
          if (ex_fs.status[f] != FaultStatus::Untestable && a.status[f] != FaultStatus::Detected)
            missed.push_back(fault_name(v.netlist, a.faults[f]));
        const auto b = fault_simulate(red.netlist, st);
        std::vector<std::string> missed_b;
        for (std::size_t f = 0; f < b.faults.size(); ++f)
          if (b.status[f] != FaultStatus::Detected) missed_b.push_back(fault_name(red.netlist, b.faults[f]));
        auto& agg = per_variant[name + " " + v.style.label()];
        agg.sets += 1;
        if (!missed.empty() || !missed_b.empty()) agg.violating += 1;
        agg.max_a = std::max(agg.max_a, missed.size());
        agg.max_b = std::max(agg.max_b, missed_b.size());
        if (agg.example.empty() && !missed.empty()) agg.example = missed.front();
        if (agg.example.empty() && !missed_b.empty()) agg.example = missed_b.front();
        violations_a += !missed.empty();
        violations_b += !missed_b.empty();
      }
    }
  }
  for (const auto& [key, agg] : per_variant)
    if (agg.violating)
      violations_out.push_back(fmt("%s: %zu/%zu test sets, up to %zu testable faults missed (%zu after redundancy "
                                   "removal), e.g. %s",
                                   key.c_str(), agg.violating, agg.sets, agg.max_a, agg.max_b, agg.example.c_str()));
  o.note(fmt("%zu circuits, %zu variants, %zu (variant, test set) runs", circuits, variants, sets));
  o.note(fmt("violations: %zu as synthesized, %zu after redundancy removal", violations_a, violations_b));
  if (violations_a || violations_b) o.fail("stuck-at escapes under 100% GIF-PO test sets");
  return o;
}

// ---- 6 ---------------------------------------------------------------------

Outcome multiplier() {
  Outcome o;
  const auto e = elab("mul8");
  const auto u0 = build_reduced_universe(e);
  const auto ex = FrameSet::exhaustive(u0.netlist());
  const auto db = run_coverage(u0, ex);
  const auto u = mark_unreachable_auto(u0, db.covered_mask());
  const auto s = summarize(u, db);
  o.note(fmt("universe %zu total / %zu unreachable (table: 1935 / 49)", s.total, s.unreachable));
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_kind;  // points, unreachable
  for (std::size_t p = 0; p < u.size(); ++p) {
    const auto& c = u.netlist().cells()[u.classes[u.points[p].cls].cell];
    auto& k = by_kind[std::string(cell_kind_name(c.kind)) + std::to_string(c.in.size())];
    ++k.first;
    if (u.points[p].status != PointStatus::Open) ++k.second;
  }
  std::string delta;
  for (const auto& [k, v] : by_kind) delta += fmt("%s%s %zu/%zu", delta.empty() ? "" : ", ", k.c_str(), v.first, v.second);
  o.note("decomposition (points/unreachable per cell kind): " + delta);
  o.expect(s.covered == s.open, "exhaustive run leaves open points");
  const auto ts = greedy_select(u, ex, db);
  o.note(fmt("GIF-selected set: %zu cycles", ts.size()));

  const auto gate = lower(e, SynthStyle::parse("aotree"));
  const auto red = remove_all_redundancy(gate);
  const bool eq = !exhaustive_equivalence(gate, red.netlist).has_value();
  o.note(fmt("AOTREE: %zu nets, %zu tied, %zu nets after tying, equivalent=%s", gate.num_nets(), red.tied.size(),
             red.netlist.num_nets(), eq ? "yes" : "no"));
  o.expect(eq, "reduced netlist not equivalent");
  const auto fsr = fault_simulate(red.netlist, ts.stimulus);
  o.note(fmt("stuck-at from the GIF-selected set: %zu/%zu (%.2f%%)", fsr.detected(), fsr.faults.size(),
             fsr.percent()));
  if (fsr.detected() != fsr.faults.size()) {
    std::vector<std::string> missed;
    for (std::size_t f = 0; f < fsr.faults.size(); ++f)
      if (fsr.status[f] != FaultStatus::Detected) missed.push_back(fault_name(red.netlist, fsr.faults[f]));
    o.fail(fmt("%zu testable faults escape: %s", missed.size(), join(missed, 4).c_str()));
  }
  return o;
}

// ---- 7 ---------------------------------------------------------------------

Outcome compaction() {
  Outcome o;
  const auto c1 = gate_netlist_from_circuit(load_circuit(oracle::circuit("c1")));
  TestSet ti;
  ti.stimulus = Stimulus::parse("inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n");
  ti.origin = {0, 1, 2, 3};
  const auto ct = compact(ti, c1);
  std::string kept;
  for (auto t : ct.origin) kept += std::to_string(t + 1);
  o.note(fmt("compact(Ti, C1 stuck-at) = %zu cycles (kept %s)", ct.size(), kept.c_str()));
  o.expect(ct.size() == 3, "Ti did not compact to 3 cycles");
  o.expect(ct.covered == 10, "compacted Ti lost C1 coverage");

  std::size_t runs = 0;
  for (const auto& name : bundled()) {
    const auto e = elab(name);
    const auto u = build_reduced_universe(e);
    const auto st = generated_stimulus(u.netlist());
    const auto ts = greedy_select(u, st);
    const auto g = compact(ts, u);
    o.expect(g.covered == ts.covered, name + ": GIF-PO compaction lowered coverage");
    o.expect(summarize(u, run_coverage(u, g.stimulus)).covered == ts.covered,
             name + ": compacted GIF-PO set re-simulates lower");
    const auto gate = lower(e, SynthStyle::parse("aotree"));
    const auto before = fault_simulate(gate, ts.stimulus).detected();
    const auto s = compact(ts, gate);
    o.expect(s.covered == before && fault_simulate(gate, s.stimulus).detected() == before,
             name + ": stuck-at compaction lowered coverage");
    o.expect(g.size() <= ts.size() && s.size() <= ts.size(), name + ": compaction grew the set");
    runs += 2;
  }
  o.note(fmt("%zu compaction runs on %zu circuits, none lowered coverage", runs, bundled().size()));
  return o;
}

// ---- 8 ---------------------------------------------------------------------

Outcome curves() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& name : bundled()) {
    const auto row = make_report(oracle::circuit(name));
    ++n;
    const auto& c = row.curve;
    bool mono = true;
    for (std::size_t t = 1; t < c.size(); ++t)
      mono = mono && c[t].gifpo >= c[t - 1].gifpo && c[t].stuckat >= c[t - 1].stuckat;
    o.expect(mono, name + ": curve not monotone");
    o.expect(!c.empty() && c.back().gifpo == 100.0 && c.back().stuckat == 100.0,
             fmt("%s: curve ends at %.2f%% GIF-PO / %.2f%% stuck-at", name.c_str(), c.empty() ? 0.0 : c.back().gifpo,
                 c.empty() ? 0.0 : c.back().stuckat));

    const auto u = build_reduced_universe(elab(name));
    const auto st = generated_stimulus(u.netlist());
    const auto packed = run_coverage(u, st, {64, 1});
    o.expect(run_coverage(u, st, {1, 1}) == packed, name + ": sequential CoverageDB differs");
    o.expect(run_coverage(u, st, {64, 4}) == packed, name + ": threaded CoverageDB differs");
  }
  o.note(fmt("%zu circuits: curves monotone and complete; packed == sequential == threaded", n));
  return o;
}

// ---- 9 ---------------------------------------------------------------------

// Word-parallel evaluation with one net pinned, written against the scalar
// oracle's cell semantics rather than the engine's kernels.
void eval_forced(const Netlist& n, const std::uint64_t* pis, NetId site, std::uint64_t site_value,
                 std::vector<std::uint64_t>& val) {
  val.assign(n.num_nets(), 0);
  for (std::size_t i = 0; i < n.pis().size(); ++i) val[n.pis()[i]] = pis[i];
  if (n.is_pi(site)) val[site] = site_value;
  for (auto ci : n.topo()) {
    const auto& c = n.cells()[ci];
    std::vector<std::uint64_t> v(c.in.size());
    for (std::size_t i = 0; i < c.in.size(); ++i) v[i] = ((c.inv >> i) & 1u) ? ~val[c.in[i]] : val[c.in[i]];
    std::vector<std::uint64_t> out(c.out.size());
    switch (c.kind) {
      case CellKind::Const0: out[0] = 0; break;
      case CellKind::Const1: out[0] = ~0ull; break;
      case CellKind::Buf: out[0] = v[0]; break;
      case CellKind::Inv: out[0] = ~v[0]; break;
      case CellKind::And: out[0] = ~0ull; for (auto x : v) out[0] &= x; break;
      case CellKind::Or: out[0] = 0; for (auto x : v) out[0] |= x; break;
      case CellKind::Xor: out[0] = 0; for (auto x : v) out[0] ^= x; break;
      case CellKind::Mux2: out[0] = (v[0] & v[2]) | (~v[0] & v[1]); break;
      case CellKind::Ha: out[0] = v[0] ^ v[1]; out[1] = v[0] & v[1]; break;
      case CellKind::Fa:
        out[0] = v[0] ^ v[1] ^ v[2];
        out[1] = (v[0] & v[1]) | (v[0] & v[2]) | (v[1] & v[2]);
        break;
    }
    for (std::size_t k = 0; k < c.out.size(); ++k) val[c.out[k]] = c.out[k] == site ? site_value : out[k];
  }
}

Outcome oracles() {
  Outcome o;
  std::size_t circuits = 0, checks = 0, mismatches = 0;
  for (const auto& name : bundled()) {
    const auto e = elab(name);
    const auto& n = e.netlist;
    if (n.pis().size() > 20) continue;
    ++circuits;
    const auto frames = FrameSet::exhaustive(n);
    const auto good = simulate_good(n, frames);
    ConeSimulator cs(n);
    std::vector<std::uint64_t> forced;
    for (NetId s = 0; s < n.num_nets(); ++s) {
      cs.set_site(s);
      for (std::size_t b = 0; b < frames.blocks(); ++b) {
        const auto mask = frames.lane_mask(b);
        cs.propagate(good.block(b));
        eval_forced(n, frames.block(b), s, ~good.block(b)[s], forced);
        for (std::uint32_t j = 0; j < n.pos().size(); ++j) {
          const auto expect = (forced[n.pos()[j]] ^ good.block(b)[n.pos()[j]]) & mask;
          std::uint64_t got = 0;
          const auto& rp = cs.reachable_pos();
          const auto it = std::find(rp.begin(), rp.end(), j);
          if (it != rp.end()) got = cs.po_diff(static_cast<std::size_t>(it - rp.begin())) & mask;
          ++checks;
          if (got != expect) ++mismatches;
        }
      }
    }
  }
  o.note(fmt("observability: %zu circuits, %zu (net, PO, 64-frame block) checks, %zu mismatches", circuits, checks,
             mismatches));
  o.expect(mismatches == 0, "observability differs from forced dual simulation");

  // Every member fault of a class is detected by exactly the class's
  // (minterm, observed) pairs.
  const std::vector<std::pair<CellKind, int>> kinds = {
      {CellKind::Buf, 1}, {CellKind::Inv, 1}, {CellKind::And, 2}, {CellKind::And, 3}, {CellKind::And, 4},
      {CellKind::Or, 2},  {CellKind::Or, 3},  {CellKind::Or, 4},  {CellKind::Xor, 2}, {CellKind::Xor, 3},
      {CellKind::Mux2, 3}, {CellKind::Ha, 2}, {CellKind::Fa, 3}};
  std::size_t classes = 0, members = 0;
  for (auto [kind, arity] : kinds) {
    const auto cls = enumerate_gifs(kind, arity);
    const auto faults = enumerate_gif_faults(kind, arity);
    std::size_t fi = 0;
    for (const auto& c : cls) {
      ++classes;
      std::set<std::pair<std::uint32_t, bool>> class_set{{c.minterm, true}};
      for (int p = 0; p < arity; ++p) {
        if (!((c.members >> p) & 1u)) continue;
        ++members;
        if (fi >= faults.size() || faults[fi].gi != p || faults[fi].go != c.go || faults[fi].minterm != c.minterm) {
          o.fail(fmt("%s%d: member order", std::string(cell_kind_name(kind)).c_str(), arity));
          break;
        }
        ++fi;
        // A member fault is detected when its minterm is applied and the
        // output is observed; it must flip the output there, as the class
        // point itself does.
        std::set<std::pair<std::uint32_t, bool>> member_set;
        for (std::uint32_t m = 0; m < (1u << arity); ++m)
          for (bool observed : {false, true}) {
            const int y = oracle::eval_local(kind, arity, m, c.go);
            const int z = oracle::eval_local(kind, arity, m ^ (1u << (arity - 1 - p)), c.go);
            if (m == faults[fi - 1].minterm && observed && y != z) member_set.insert({m, observed});
          }
        if (member_set != class_set)
          o.fail(fmt("%s%d class m=%s: member %d detected differently", std::string(cell_kind_name(kind)).c_str(),
                     arity, minterm_string(c.minterm, arity).c_str(), p));
      }
      // Non-members are not sensitized at the class minterm.
      for (int p = 0; p < arity; ++p)
        if (!((c.members >> p) & 1u) &&
            oracle::eval_local(kind, arity, c.minterm, c.go) !=
                oracle::eval_local(kind, arity, c.minterm ^ (1u << (arity - 1 - p)), c.go))
          o.fail(fmt("%s%d: sensitized pin %d missing from class", std::string(cell_kind_name(kind)).c_str(), arity,
                     p));
    }
    if (fi != faults.size()) o.fail(fmt("%s%d: fault list size", std::string(cell_kind_name(kind)).c_str(), arity));
  }
  o.note(fmt("class collapse: %zu kinds, %zu classes, %zu member faults", kinds.size(), classes, members));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  std::vector<std::string> violations;
  const std::vector<Criterion> criteria = {
      {1, "AND2/XOR2 GIF classes", two_input_gates},
      {2, "HA/FA GIF classes", adder_cells},
      {3, "C1/C2 example with Ti", example_circuits},
      {4, "adder GIF-PO counts", adder_counts},
      {5, "100% GIF-PO implies 100% stuck-at on permissible variants",
       [&] { return central_claim(violations); }},
      {6, "8x8 multiplier pipeline", multiplier},
      {7, "compaction contract", compaction},
      {8, "coverage curves and packed evaluation", curves},
      {9, "oracle cross-checks", oracles},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    if (c.id == 5)
      for (const auto& v : violations) std::printf("    violation: %s\n", v.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
