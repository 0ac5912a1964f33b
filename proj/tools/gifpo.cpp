#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gifpo/circuit.hpp"
#include "gifpo/coverage.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "gifpo/gif.hpp"
#include "gifpo/stuckat.hpp"
#include "gifpo/synth.hpp"
#include "gifpo/tpg.hpp"
#include "gifpo/workbench.hpp"
#include "json.hpp"

using namespace gifpo;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string percent_text(std::size_t num, std::size_t den) {
  const double p = den == 0 ? 100.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  std::ostringstream os;
  if (num == den) os << "100%";
  else os << std::fixed << std::setprecision(2) << p << "%";
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write '" + path + "'");
  out << text;
}

struct Design {
  ElaboratedCircuit e;
  GifPoUniverse u;
};

Design load_design(const std::string& arg, const std::string& fpd) {
  Design d{elaborate(load_circuit(resolve_circuit(arg))), {}};
  d.u = build_reduced_universe(d.e);
  if (!fpd.empty()) {
    const auto db = FalsePathDB::load(fpd);
    auto app = apply_fpd(d.u, db);
    for (auto i : app.stale) std::cerr << "warning: fpd entry on line " << db.entries[i].line << " matches no point\n";
    d.u = std::move(app.universe);
  }
  return d;
}

// Explicit stimulus file, or exhaustive when none is given.
Stimulus load_stimulus(const Netlist& n, const std::string& stim, bool& exhaustive) {
  exhaustive = stim.empty();
  return exhaustive ? gen_exhaustive(n) : Stimulus::load(stim);
}

// Word-level circuit lowered with a style, or a primitive-only GNL taken
// as the gate netlist itself.
Netlist gate_netlist(const std::string& arg, const std::string& style, std::uint64_t seed, int steps, bool as_gate) {
  const auto c = load_circuit(resolve_circuit(arg));
  if (as_gate) return gate_netlist_from_circuit(c);
  const auto e = elaborate(c);
  auto st = SynthStyle::parse(style, seed, std::max(steps, 0));
  if (st.kind == StyleKind::Rewrite && steps < 0) st.steps = default_rewrite_steps(lower(e, SynthStyle{}));
  return lower(e, st);
}

struct StyleOpts {
  std::string style = "ripple";
  std::uint64_t seed = 1;
  int steps = -1;
  bool as_gate = false;
  void add(CLI::App* app) {
    app->add_option("--style", style, "ripple|two-level|aotree|rewrite")->capture_default_str();
    app->add_option("--seed", seed, "REWRITE seed")->capture_default_str();
    app->add_option("--steps", steps, "REWRITE steps (default: half the RIPPLE cell count)");
    app->add_flag("--gate", as_gate, "input is already a primitive gate netlist");
  }
};

void print_summary(const CoverageSummary& s) {
  std::cout << "GIF-PO " << s.covered << "/" << s.open << " (" << percent_text(s.covered, s.open) << ")\n";
  std::cout << "points " << s.total << ", unreachable " << s.unreachable << ", cycles " << s.cycles << "\n";
}

json fault_json(const Netlist& n, const FaultSimResult& r) {
  json arr = json::array();
  for (std::size_t i = 0; i < r.faults.size(); ++i)
    arr.push_back({{"fault", fault_name(n, r.faults[i])},
                   {"status", std::string(fault_status_name(r.status[i]))},
                   {"first_cycle", r.first_cycle[i]}});
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GIF-PO RTL test model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  EngineOptions eng;
  app.add_option("--threads", eng.threads, "worker threads")->capture_default_str();

  // parse
  std::string parse_in;
  bool parse_print = false;
  auto* parse = app.add_subcommand("parse", "Validate a GNL design");
  parse->add_option("circuit", parse_in)->required();
  parse->add_flag("--print", parse_print, "print canonical GNL");

  // gifs
  std::string gifs_in, gifs_fpd;
  bool gifs_list = false, gifs_raw = false;
  auto* gifs = app.add_subcommand("gifs", "Enumerate GIF classes and GIF-PO points");
  gifs->add_option("circuit", gifs_in)->required();
  gifs->add_option("--fpd", gifs_fpd, "false-path database");
  gifs->add_flag("--list", gifs_list, "list every point");
  gifs->add_flag("--raw", gifs_raw, "skip constant/open propagation");

  // cover
  std::string cover_in, cover_stim, cover_fpd, cover_json, cover_suggest, cover_ws;
  bool cover_no_auto = false;
  auto* cover = app.add_subcommand("cover", "GIF-PO coverage of a stimulus");
  cover->add_option("circuit", cover_in);
  cover->add_option("--stim", cover_stim, "stimulus file (default: exhaustive)");
  cover->add_option("--fpd", cover_fpd, "false-path database");
  cover->add_option("--json", cover_json, "write per-point results");
  cover->add_option("--suggest-fpd", cover_suggest, "write FPD entries for uncovered points");
  cover->add_flag("--no-auto-unreachable", cover_no_auto, "keep uncovered points open under exhaustive stimulus");
  cover->add_option("--workspace,-w", cover_ws, "run in a workspace directory and record runs/<id>/");

  // faultsim
  std::string fs_in, fs_stim, fs_json, fs_csv;
  StyleOpts fs_style;
  bool fs_exhaustive = false;
  auto* faultsim = app.add_subcommand("faultsim", "Stuck-at fault simulation of a gate netlist");
  faultsim->add_option("circuit", fs_in)->required();
  faultsim->add_option("--stim", fs_stim, "stimulus file");
  faultsim->add_flag("--exhaustive", fs_exhaustive, "all assignments; undetected faults are untestable");
  faultsim->add_option("--json", fs_json, "per-fault results");
  faultsim->add_option("--csv", fs_csv, "cumulative detection curve");
  fs_style.add(faultsim);

  // synth
  std::string syn_in, syn_out = "-";
  StyleOpts syn_style;
  int syn_suite = 0;
  bool syn_check = false;
  auto* synth = app.add_subcommand("synth", "Lower to a primitive gate netlist");
  synth->add_option("circuit", syn_in)->required();
  synth->add_option("-o,--output", syn_out, "output GNL ('-' for stdout)");
  synth->add_option("--suite", syn_suite, "emit k variants into the output directory");
  synth->add_flag("--check", syn_check, "exhaustive equivalence check against the source");
  syn_style.add(synth);

  // report
  std::vector<std::string> rep_in;
  std::string rep_style = "aotree", rep_stim, rep_fpd, rep_curve;
  std::uint64_t rep_seed = 1;
  std::size_t rep_random = 1000;
  int rep_window = 2;
  bool rep_json = false;
  auto* report = app.add_subcommand("report", "Coverage results row per circuit");
  report->add_option("circuits", rep_in, "files or bundled names")->required();
  report->add_option("--style", rep_style)->capture_default_str();
  report->add_option("--seed", rep_seed)->capture_default_str();
  report->add_option("--stim", rep_stim, "stimulus file (single circuit)");
  report->add_option("--fpd", rep_fpd, "false-path database (single circuit)");
  report->add_option("--random-cycles", rep_random)->capture_default_str();
  report->add_option("--window", rep_window, "bitslice window")->capture_default_str();
  report->add_option("--curve", rep_curve, "write the correlation curve CSV (single circuit)");
  report->add_flag("--json", rep_json, "JSON lines instead of a table");

  // serve
  std::string srv_ws, srv_host = "127.0.0.1";
  int srv_port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP/JSON service for a workspace");
  serve_cmd->add_option("workspace", srv_ws)->required();
  serve_cmd->add_option("--host", srv_host)->capture_default_str();
  serve_cmd->add_option("--port", srv_port, "0 picks a free port")->capture_default_str();

  // select / compact / export, top level and under tpg
  struct SetOpts {
    std::string in, stim, fpd, out, format = "both", metric = "gifpo";
    StyleOpts style;
  };
  SetOpts sel, cmp, exp;
  auto add_select = [&](CLI::App* parent) {
    auto* c = parent->add_subcommand("select", "Keep cycles that add GIF-PO coverage");
    c->add_option("circuit", sel.in)->required();
    c->add_option("--stim", sel.stim, "source stimulus (default: exhaustive)");
    c->add_option("--fpd", sel.fpd);
    c->add_option("-o,--output", sel.out, "output base path")->required();
    c->add_option("--format", sel.format, "stim|json|both")->capture_default_str();
    return c;
  };
  auto add_compact = [&](CLI::App* parent) {
    auto* c = parent->add_subcommand("compact", "Greedy set-cover compaction of a test set");
    c->add_option("circuit", cmp.in)->required();
    c->add_option("--stim", cmp.stim, "test set to compact")->required();
    c->add_option("--metric", cmp.metric, "gifpo|stuckat")->capture_default_str();
    c->add_option("--fpd", cmp.fpd);
    c->add_option("-o,--output", cmp.out, "output base path")->required();
    c->add_option("--format", cmp.format, "stim|json|both")->capture_default_str();
    cmp.style.add(c);
    return c;
  };
  auto* select = add_select(&app);
  auto* compact_cmd = add_compact(&app);
  auto* tpg = app.add_subcommand("tpg", "Test pattern generation");
  tpg->require_subcommand(1);
  auto* tpg_select = add_select(tpg);
  auto* tpg_compact = add_compact(tpg);
  auto* tpg_export = tpg->add_subcommand("export", "Write a test set with its manifest");
  tpg_export->add_option("circuit", exp.in)->required();
  tpg_export->add_option("--stim", exp.stim, "test set")->required();
  tpg_export->add_option("--metric", exp.metric, "gifpo|stuckat")->capture_default_str();
  tpg_export->add_option("--fpd", exp.fpd);
  tpg_export->add_option("-o,--output", exp.out, "output base path")->required();
  tpg_export->add_option("--format", exp.format, "stim|json")->required();
  exp.style.add(tpg_export);

  std::string gen_in, gen_mode = "random", gen_out = "-", gen_bg;
  std::size_t gen_count = 1000;
  std::uint64_t gen_seed = 1;
  std::vector<double> gen_weights;
  int gen_window = 2;
  auto* tpg_gen = tpg->add_subcommand("gen", "Generate a stimulus");
  tpg_gen->add_option("circuit", gen_in)->required();
  tpg_gen->add_option("--mode", gen_mode, "exhaustive|random|weighted|bitslice")->capture_default_str();
  tpg_gen->add_option("-n,--count", gen_count)->capture_default_str();
  tpg_gen->add_option("--seed", gen_seed)->capture_default_str();
  tpg_gen->add_option("--weights", gen_weights, "one weight, or one per PI bit")->delimiter(',');
  tpg_gen->add_option("--window", gen_window)->capture_default_str();
  tpg_gen->add_option("-o,--output", gen_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) {
      auto c = load_circuit(resolve_circuit(parse_in));
      if (parse_print) {
        std::cout << print_circuit(c);
      } else {
        std::cout << c.name << ": " << c.inputs.size() << " inputs (" << c.input_bits() << " bits), "
                  << c.outputs.size() << " outputs, " << c.registers.size() << " registers (" << c.state_bits()
                  << " bits), " << c.gates.size() << " gates\n";
      }
    } else if (*gifs) {
      const auto e = elaborate(load_circuit(resolve_circuit(gifs_in)));
      auto u = gifs_raw ? build_universe(std::make_shared<const ElaboratedCircuit>(e)) : build_reduced_universe(e);
      if (!gifs_fpd.empty()) u = apply_fpd(u, FalsePathDB::load(gifs_fpd)).universe;
      std::cout << "cells " << u.netlist().cells().size() << ", classes " << u.classes.size() << ", points "
                << u.size() << ", unreachable " << u.unreachable_count() << "\n";
      if (!gifs_raw)
        for (const auto& r : u.reduction_log)
          std::cout << "reduce " << r.cell << " " << r.action << " " << r.classes_before << "->" << r.classes_after
                    << "\n";
      if (gifs_list)
        for (std::size_t p = 0; p < u.size(); ++p)
          std::cout << p << " " << u.cell_name(p) << " " << u.out_pin(p) << " m=" << u.minterm(p) << " po="
                    << u.po_name(p) << " [" << u.members(p) << "] " << point_status_name(u.points[p].status) << "\n";
    } else if (*cover) {
      if (!cover_ws.empty()) {
        WorkspaceLock lock(cover_ws);
        std::optional<std::string> stim;
        if (!cover_stim.empty()) stim = cover_stim;
        auto s = Session::open(cover_ws, stim, eng);
        print_summary(s.manifest.summary);
        std::cout << "run " << s.manifest.run_id() << "\n";
      } else {
        if (cover_in.empty()) throw Error("arity", "cover needs a circuit or --workspace");
        auto d = load_design(cover_in, cover_fpd);
        bool exhaustive = false;
        const auto st = load_stimulus(d.u.netlist(), cover_stim, exhaustive);
        const auto db = run_coverage(d.u, st, eng);
        if (exhaustive && !cover_no_auto) d.u = mark_unreachable_auto(d.u, db.covered_mask());
        print_summary(summarize(d.u, db));
        if (!cover_json.empty()) {
          json arr = json::array();
          for (std::size_t p = 0; p < d.u.size(); ++p)
            arr.push_back({{"gate", d.u.cell_name(p)},
                           {"out", d.u.out_pin(p)},
                           {"m", d.u.minterm(p)},
                           {"po", d.u.po_name(p)},
                           {"status", std::string(point_status_name(d.u.points[p].status))},
                           {"first_cycle", db.first_cycle(p)}});
          write_text(cover_json, arr.dump(2) + "\n");
        }
        if (!cover_suggest.empty())
          write_text(cover_suggest, suggest_fpd(d.u, db.covered_mask(), "uncovered", "gifpo").serialize());
      }
    } else if (*faultsim) {
      const auto n = gate_netlist(fs_in, fs_style.style, fs_style.seed, fs_style.steps, fs_style.as_gate);
      FaultSimResult r;
      if (fs_exhaustive) r = exhaustive_fault_simulate(n, eng);
      else if (!fs_stim.empty()) r = fault_simulate(n, Stimulus::load(fs_stim), eng);
      else throw Error("arity", "faultsim needs --stim or --exhaustive");
      const auto den = r.faults.size() - r.untestable();
      std::cout << "stuck-at " << r.detected() << "/" << den << " (" << percent_text(r.detected(), den)
                << "), untestable " << r.untestable() << ", nets " << n.num_nets() << "\n";
      if (!fs_json.empty()) write_text(fs_json, fault_json(n, r).dump(2) + "\n");
      if (!fs_csv.empty()) {
        std::ostringstream os;
        os << "cycle,detected\n";
        const auto c = r.curve();
        for (std::size_t t = 0; t < c.size(); ++t) os << t << "," << c[t] << "\n";
        write_text(fs_csv, os.str());
      }
    } else if (*synth) {
      const auto c = load_circuit(resolve_circuit(syn_in));
      const auto e = elaborate(c);
      if (syn_suite > 0) {
        if (syn_out == "-") throw Error("arity", "--suite needs an output directory");
        fs::create_directories(syn_out);
        for (const auto& v : variant_suite(e, syn_suite, syn_style.seed)) {
          auto name = v.style.prefix();
          if (v.style.kind == StyleKind::Rewrite) name += "-s" + std::to_string(v.style.seed);
          write_text((fs::path(syn_out) / (name + ".gnl")).string(), print_gate_netlist(v.netlist));
          std::cout << v.style.label() << " nets " << v.netlist.num_nets() << (v.checked ? " checked" : "") << "\n";
        }
      } else {
        const auto n = gate_netlist(syn_in, syn_style.style, syn_style.seed, syn_style.steps, false);
        if (syn_check) {
          if (auto cex = exhaustive_equivalence(e.netlist, n))
            throw Error("equivalence", "mismatch: " + cex->describe(n));
          std::cerr << "equivalent\n";
        }
        write_text(syn_out, print_gate_netlist(n));
      }
    } else if (*report) {
      const bool single = rep_in.size() == 1;
      if (!single && (!rep_stim.empty() || !rep_fpd.empty() || !rep_curve.empty()))
        throw Error("arity", "--stim, --fpd and --curve need a single circuit");
      ReportOptions opt;
      opt.style = SynthStyle::parse(rep_style).kind;
      opt.seed = rep_seed;
      opt.random_cycles = rep_random;
      opt.bitslice_window = rep_window;
      opt.engine = eng;
      if (!rep_stim.empty()) opt.stimulus = rep_stim;
      if (!rep_fpd.empty()) opt.fpd = rep_fpd;
      if (!rep_json) std::cout << ReportRow::header() << "\n";
      for (const auto& name : rep_in) {
        const auto row = make_report(resolve_circuit(name), opt);
        if (rep_json) std::cout << row.to_json().dump() << "\n";
        else std::cout << row.line() << "\n";
        if (!rep_curve.empty()) write_text(rep_curve, curve_csv(row.curve));
      }
    } else if (*serve_cmd) {
      serve(srv_ws, srv_host, srv_port, [&](int port, const std::function<void()>&) {
        std::cout << "listening on http://" << srv_host << ":" << port << std::endl;
      });
    } else if (*select || *tpg_select) {
      auto d = load_design(sel.in, sel.fpd);
      bool exhaustive = false;
      const auto st = load_stimulus(d.u.netlist(), sel.stim, exhaustive);
      const auto frames = bind_stimulus(d.u.netlist(), st, eng.lanes);
      const auto db = run_coverage(d.u, frames, eng);
      if (exhaustive) d.u = mark_unreachable_auto(d.u, db.covered_mask());
      auto ts = greedy_select(d.u, frames, db);
      ts.total = d.u.open_count();
      export_test_set(ts, sel.out, sel.format);
      std::cout << "selected " << ts.size() << " of " << st.size() << " cycles, GIF-PO " << ts.covered << "/"
                << ts.total << " (" << percent_text(ts.covered, ts.total) << ")\n";
    } else if (*compact_cmd || *tpg_compact) {
      TestSet ts;
      ts.stimulus = Stimulus::load(cmp.stim);
      TestSet out;
      if (metric_from_name(cmp.metric) == Metric::GifPo) {
        auto d = load_design(cmp.in, cmp.fpd);
        out = compact(ts, d.u, eng);
      } else {
        const auto n = gate_netlist(cmp.in, cmp.style.style, cmp.style.seed, cmp.style.steps, cmp.style.as_gate);
        out = compact(ts, n, {}, eng);
      }
      export_test_set(out, cmp.out, cmp.format);
      std::cout << "compacted " << ts.size() << " -> " << out.size() << " cycles, " << cmp.metric << " "
                << out.covered << "/" << out.total << "\n";
    } else if (*tpg_export) {
      TestSet ts;
      ts.stimulus = Stimulus::load(exp.stim);
      for (std::size_t t = 0; t < ts.size(); ++t) ts.origin.push_back(t);
      ts.metric = metric_from_name(exp.metric);
      if (ts.metric == Metric::GifPo) {
        auto d = load_design(exp.in, exp.fpd);
        const auto s = summarize(d.u, run_coverage(d.u, ts.stimulus, eng));
        ts.covered = s.covered;
        ts.total = s.open;
      } else {
        const auto n = gate_netlist(exp.in, exp.style.style, exp.style.seed, exp.style.steps, exp.style.as_gate);
        const auto r = fault_simulate(n, ts.stimulus, eng);
        ts.covered = r.detected();
        ts.total = r.faults.size();
      }
      export_test_set(ts, exp.out, exp.format);
    } else if (*tpg_gen) {
      const auto e = elaborate(load_circuit(resolve_circuit(gen_in)));
      const auto& n = e.netlist;
      Stimulus st;
      if (gen_mode == "exhaustive") st = gen_exhaustive(n);
      else if (gen_mode == "random") st = gen_random(n, gen_count, gen_seed);
      else if (gen_mode == "weighted") {
        if (gen_weights.empty()) gen_weights.push_back(0.5);
        st = gen_weighted(n, gen_count, gen_seed, gen_weights);
      } else if (gen_mode == "bitslice") st = gen_bitslice(n, gen_window);
      else throw Error("arity", "unknown mode '" + gen_mode + "'");
      write_text(gen_out, st.serialize());
    }
  } catch (const Error& e) {
    std::cerr << "gifpo: " << (dynamic_cast<const ParseError*>(&e) ? "" : "error[" + e.code() + "]: ") << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "gifpo: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
