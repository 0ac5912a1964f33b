#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cctype>
#include <memory>
#include <optional>
#include <string>

#include "gifpo/circuit.hpp"
#include "gifpo/coverage.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "gifpo/gif.hpp"
#include "gifpo/stuckat.hpp"
#include "gifpo/synth.hpp"
#include "gifpo/tpg.hpp"
#include "gifpo/workbench.hpp"

namespace py = pybind11;
using namespace gifpo;

namespace {

py::object to_py(const nlohmann::ordered_json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

SynthStyle style_of(const std::string& name, std::uint64_t seed, int steps) {
  return SynthStyle::parse(name, seed, steps);
}

struct GateNetlist {
  Netlist netlist;
  std::string style;

  std::string text() const { return print_gate_netlist(netlist); }
};

FaultSimResult simulate_faults(const Netlist& n, const std::string& stimulus) {
  return fault_simulate(n, Stimulus::parse(stimulus));
}

py::dict fault_dict(const Netlist& n, const FaultSimResult& r) {
  py::dict d;
  d["total"] = r.faults.size();
  d["detected"] = r.detected();
  d["untestable"] = r.untestable();
  d["percent"] = r.percent();
  d["curve"] = r.curve();
  py::list missed;
  for (std::size_t f = 0; f < r.faults.size(); ++f)
    if (r.status[f] == FaultStatus::Undetected) missed.append(fault_name(n, r.faults[f]));
  d["undetected"] = missed;
  return d;
}

py::dict test_set_dict(const TestSet& ts) {
  py::dict d;
  d["stimulus"] = ts.stimulus.serialize();
  d["origin"] = ts.origin;
  d["metric"] = std::string(metric_name(ts.metric));
  d["covered"] = ts.covered;
  d["total"] = ts.total;
  d["cycles"] = ts.size();
  return d;
}

// An elaborated design with its reduced GIF-PO universe.
class Design {
 public:
  static Design from_circuit(const Circuit& c) {
    Design d;
    d.circuit_ = std::make_shared<const ElaboratedCircuit>(elaborate(c));
    d.universe_ = build_reduced_universe(*d.circuit_);
    return d;
  }
  static Design load(const std::filesystem::path& p) { return from_circuit(load_circuit(p)); }
  static Design parse(const std::string& text) { return from_circuit(parse_circuit(text)); }

  std::string name() const { return circuit_->netlist.name; }
  std::size_t pi_bits() const { return universe_.netlist().pis().size(); }
  std::size_t state_bits() const { return universe_.netlist().num_state_bits(); }
  std::size_t points() const { return universe_.size(); }

  py::list gifpo_points() const {
    py::list out;
    for (std::size_t p = 0; p < universe_.size(); ++p) {
      py::dict d;
      d["id"] = p;
      d["gate"] = universe_.cell_name(p);
      d["out"] = universe_.out_pin(p);
      d["m"] = universe_.minterm(p);
      d["po"] = universe_.po_name(p);
      d["members"] = universe_.members(p);
      d["status"] = std::string(point_status_name(universe_.points[p].status));
      out.append(d);
    }
    return out;
  }

  py::dict cover(const std::optional<std::string>& stimulus, const std::optional<std::string>& fpd) const {
    auto u = universe_;
    if (fpd) u = apply_fpd(u, FalsePathDB::parse(*fpd)).universe;
    const bool exhaustive = !stimulus;
    const auto st = exhaustive ? gen_exhaustive(u.netlist()) : Stimulus::parse(*stimulus);
    const auto db = run_coverage(u, st);
    if (exhaustive) u = mark_unreachable_auto(u, db.covered_mask());
    const auto s = summarize(u, db);
    py::dict d;
    d["total"] = s.total;
    d["covered"] = s.covered;
    d["unreachable"] = s.unreachable;
    d["open"] = s.open;
    d["cycles"] = s.cycles;
    d["percent"] = s.percent();
    std::vector<std::int64_t> first(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) first[p] = db.first_cycle(p);
    d["first_cycle"] = first;
    d["curve"] = db.curve();
    return d;
  }

  GateNetlist lower_to(const std::string& style, std::uint64_t seed, int steps) const {
    return {lower(*circuit_, style_of(style, seed, steps)), style};
  }

  std::string exhaustive() const { return gen_exhaustive(universe_.netlist()).serialize(); }
  std::string random(std::size_t count, std::uint64_t seed) const {
    return gen_random(universe_.netlist(), count, seed).serialize();
  }
  std::string bitslice(int window) const { return gen_bitslice(universe_.netlist(), window).serialize(); }

  py::dict select(const std::string& stimulus) const {
    return test_set_dict(greedy_select(universe_, Stimulus::parse(stimulus)));
  }

  py::dict compact_set(const std::string& stimulus, const std::string& metric, const std::string& style) const {
    TestSet ts;
    ts.stimulus = Stimulus::parse(stimulus);
    for (std::size_t i = 0; i < ts.size(); ++i) ts.origin.push_back(i);
    if (metric_from_name(metric) == Metric::GifPo) return test_set_dict(compact(ts, universe_));
    return test_set_dict(compact(ts, lower(*circuit_, style_of(style, 1, 0))));
  }

 private:
  std::shared_ptr<const ElaboratedCircuit> circuit_;
  GifPoUniverse universe_;
};

}  // namespace

PYBIND11_MODULE(_gifpo, m) {
  m.doc() = "GIF-PO coverage, stuck-at fault simulation and test-set tools";
  m.attr("__version__") = std::string(kToolVersion);

  static py::exception<Error> error(m, "GifpoError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(py::str(e.what()));
      inst.attr("code") = e.code();
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def(
      "enumerate_gifs",
      [](std::string kind, int arity) {
        for (auto& ch : kind) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        const auto k = cell_kind_from_name(kind);
        if (!k) throw Error("unknown-kind", "unknown cell kind '" + kind + "'");
        const auto cls = enumerate_gifs(*k, arity);
        const auto labels = gif_labels(*k, arity);
        py::list out;
        for (std::size_t i = 0; i < cls.size(); ++i) {
          py::dict d;
          d["go"] = cls[i].go;
          d["minterm"] = minterm_string(cls[i].minterm, arity);
          d["alpha"] = cls[i].alpha;
          d["members"] = labels[i];
          out.append(d);
        }
        return out;
      },
      py::arg("kind"), py::arg("arity") = 2, "GIF classes of a primitive cell kind.");

  py::class_<GateNetlist>(m, "GateNetlist")
      .def_readonly("style", &GateNetlist::style)
      .def_property_readonly("nets", [](const GateNetlist& g) { return g.netlist.num_nets(); })
      .def_property_readonly("cells", [](const GateNetlist& g) { return g.netlist.cells().size(); })
      .def_property_readonly("text", &GateNetlist::text)
      .def("fault_simulate",
           [](const GateNetlist& g, const std::string& stimulus) {
             return fault_dict(g.netlist, simulate_faults(g.netlist, stimulus));
           },
           py::arg("stimulus"))
      .def("exhaustive_fault_simulate",
           [](const GateNetlist& g) { return fault_dict(g.netlist, exhaustive_fault_simulate(g.netlist)); })
      .def("remove_redundancy",
           [](const GateNetlist& g) {
             auto r = remove_all_redundancy(g.netlist);
             return py::make_tuple(GateNetlist{std::move(r.netlist), g.style}, r.tied);
           })
      .def("equivalent", [](const GateNetlist& a, const GateNetlist& b) {
        return !exhaustive_equivalence(a.netlist, b.netlist).has_value();
      });

  py::class_<Design>(m, "Design")
      .def_static("load", &Design::load, py::arg("path"))
      .def_static("parse", &Design::parse, py::arg("text"))
      .def_property_readonly("name", &Design::name)
      .def_property_readonly("pi_bits", &Design::pi_bits)
      .def_property_readonly("state_bits", &Design::state_bits)
      .def_property_readonly("points", &Design::points)
      .def("gifpo_points", &Design::gifpo_points)
      .def("cover", &Design::cover, py::arg("stimulus") = std::nullopt, py::arg("fpd") = std::nullopt,
           "GIF-PO coverage; without a stimulus, exhaustive with uncovered points marked unreachable.")
      .def("lower", &Design::lower_to, py::arg("style") = "ripple", py::arg("seed") = 0, py::arg("steps") = 0)
      .def("exhaustive", &Design::exhaustive)
      .def("random", &Design::random, py::arg("count"), py::arg("seed") = 1)
      .def("bitslice", &Design::bitslice, py::arg("window") = 2)
      .def("select", &Design::select, py::arg("stimulus"))
      .def("compact", &Design::compact_set, py::arg("stimulus"), py::arg("metric") = "gifpo",
           py::arg("style") = "aotree");

  m.def(
      "report",
      [](const std::filesystem::path& circuit, const std::string& style, std::uint64_t seed) {
        ReportOptions opt;
        opt.style = SynthStyle::parse(style).kind;
        opt.seed = seed;
        return to_py(make_report(circuit, opt).to_json());
      },
      py::arg("circuit"), py::arg("style") = "aotree", py::arg("seed") = 1,
      "One coverage-results row for a circuit file.");
}
