#include "gifpo/workbench.hpp"

#include <fcntl.h>
#include <fnmatch.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <shared_mutex>
#include <sstream>

#include "gifpo/circuit.hpp"
#include "gifpo/elaborate.hpp"
#include "gifpo/error.hpp"
#include "httplib.h"

#ifndef GIFPO_CIRCUITS_DIR
#define GIFPO_CIRCUITS_DIR "circuits"
#endif

namespace gifpo {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("internal", "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("io", "cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("io", "cannot write '" + p.string() + "'");
  out << data;
}

bool glob(const std::string& pattern, const std::string& s) {
  return pattern.empty() || fnmatch(pattern.c_str(), s.c_str(), 0) == 0;
}

double pct(std::size_t num, std::size_t den) {
  return den == 0 ? 100.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::string sha256_file(const fs::path& p) { return sha256_hex(read_file(p)); }

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// ---- manifest ----------------------------------------------------------------

std::string RunManifest::run_id() const {
  std::string key = circuit_hash + "|" + stimulus_hash + "|" + fpd_hash + "|" + tool_version;
  for (auto s : seeds) key += "|" + std::to_string(s);
  return sha256_hex(key).substr(0, 16);
}

json RunManifest::to_json() const {
  json j;
  j["run_id"] = run_id();
  j["circuit_hash"] = circuit_hash;
  j["stimulus_hash"] = stimulus_hash;
  j["fpd_hash"] = fpd_hash;
  j["tool_version"] = tool_version;
  j["seeds"] = seeds;
  j["started"] = started;
  j["finished"] = finished;
  j["summary"] = {{"total", summary.total},       {"redundant", summary.unreachable},
                  {"open", summary.open},         {"covered", summary.covered},
                  {"cycles", summary.cycles},     {"percent", round2(summary.percent())}};
  json vs = json::array();
  for (const auto& v : variants)
    vs.push_back({{"style", v.style},
                  {"nets", v.nets},
                  {"faults", v.faults},
                  {"untestable", v.untestable},
                  {"detected", v.detected},
                  {"percent", round2(v.percent)}});
  j["variants"] = vs;
  return j;
}

// ---- curves ----------------------------------------------------------------

std::vector<CurvePoint> correlation_curve(const GifPoUniverse& u, const CoverageDB& db, const FaultSimResult& fsr) {
  if (db.cycles() != fsr.cycles)
    throw Error("cycle-mismatch", "coverage has " + std::to_string(db.cycles()) + " cycles, fault run has " +
                                      std::to_string(fsr.cycles));
  // Only open points count toward the GIF-PO percentage.
  std::vector<std::uint64_t> fresh(db.cycles(), 0);
  for (std::size_t p = 0; p < u.size(); ++p)
    if (u.points[p].status == PointStatus::Open && db.covered(p))
      ++fresh[static_cast<std::size_t>(db.first_cycle(p))];
  const auto sa = fsr.curve();
  const std::size_t sa_den = fsr.faults.size() - fsr.untestable();
  std::vector<CurvePoint> out;
  std::uint64_t acc = 0;
  for (std::size_t t = 0; t < db.cycles(); ++t) {
    acc += fresh[t];
    out.push_back({t, pct(acc, u.open_count()), pct(sa[t], sa_den)});
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& c) {
  std::ostringstream os;
  os << "cycle,gifpo_pct,stuckat_pct\n" << std::fixed << std::setprecision(2);
  for (const auto& p : c) os << p.cycle << "," << p.gifpo << "," << p.stuckat << "\n";
  return os.str();
}

std::vector<std::pair<std::size_t, std::size_t>> flat_segments(const std::vector<CurvePoint>& c,
                                                               std::size_t min_len) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 1;
  auto flush = [&](std::size_t end) {
    if (end >= start && end - start + 1 >= min_len) out.push_back({c[start].cycle, c[end].cycle});
  };
  for (std::size_t t = 1; t < c.size(); ++t) {
    const bool flat = c[t].gifpo == c[t - 1].gifpo && c[t].stuckat == c[t - 1].stuckat;
    if (!flat) {
      if (t > start) flush(t - 1);
      start = t + 1;
    }
  }
  if (!c.empty() && start < c.size()) flush(c.size() - 1);
  return out;
}

// ---- report ----------------------------------------------------------------

fs::path bundled_circuits_dir() {
  if (const char* env = std::getenv("GIFPO_CIRCUITS")) return env;
  return GIFPO_CIRCUITS_DIR;
}

fs::path resolve_circuit(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  auto p = bundled_circuits_dir() / (arg + ".gnl");
  if (fs::exists(p)) return p;
  throw Error("io", "no circuit '" + arg + "' (not a file, not bundled)");
}

namespace {

bool uniform_fields(const Netlist& n) {
  int w = -1;
  for (const auto& f : n.input_fields()) {
    if (f.is_state) return false;
    if (w >= 0 && static_cast<int>(f.bits.size()) != w) return false;
    w = static_cast<int>(f.bits.size());
  }
  return w > 0;
}

}  // namespace

json ReportRow::to_json() const {
  json j;
  j["testcase"] = name;
  j["stimulus"] = stimulus_source;
  j["pi_bits"] = pi_bits;
  j["gifpo"] = gifpo_total;
  j["gifpo_redundant"] = gifpo_redundant;
  j["functional_cycles"] = functional_cycles;
  j["pattern_rtl"] = pattern_rtl;
  j["coverage_gifpo"] = round2(coverage_gifpo);
  j["style"] = style;
  j["nets"] = nets;
  j["tied"] = tied;
  j["pattern_netlist"] = pattern_netlist;
  j["coverage_stuckat"] = round2(coverage_stuckat);
  j["stuckat_detected"] = stuckat_detected;
  j["stuckat_total"] = stuckat_total;
  return j;
}

std::string ReportRow::header() {
  std::ostringstream os;
  os << std::left << std::setw(10) << "testcase" << std::right << std::setw(8) << "GIF-PO" << std::setw(11)
     << "redundant" << std::setw(12) << "functional" << std::setw(9) << "pattern" << std::setw(10) << "coverage"
     << "  " << std::left << std::setw(10) << "style" << std::right << std::setw(7) << "nets" << std::setw(9)
     << "pattern" << std::setw(10) << "coverage\n";
  os << std::left << std::setw(10) << "" << std::right << std::setw(8) << "" << std::setw(11) << "" << std::setw(12)
     << "cycles" << std::setw(9) << "RTL" << std::setw(10) << "GIF-PO"
     << "  " << std::left << std::setw(10) << "" << std::right << std::setw(7) << "" << std::setw(9) << "netlist"
     << std::setw(10) << "stuck-at";
  return os.str();
}

std::string ReportRow::line() const {
  std::ostringstream os;
  auto pc = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(v == 100.0 ? 0 : 2) << v << "%";
    return s.str();
  };
  os << std::left << std::setw(10) << name << std::right << std::setw(8) << gifpo_total << std::setw(11)
     << gifpo_redundant << std::setw(12) << functional_cycles << std::setw(9) << pattern_rtl << std::setw(10)
     << pc(coverage_gifpo) << "  " << std::left << std::setw(10) << style << std::right << std::setw(7) << nets
     << std::setw(9) << pattern_netlist << std::setw(10) << pc(coverage_stuckat);
  return os.str();
}

ReportRow make_report(const fs::path& path, const ReportOptions& opt) {
  const auto circuit = load_circuit(path);
  const auto e = elaborate(circuit);
  GifPoUniverse u = build_reduced_universe(e);
  if (opt.fpd) u = apply_fpd(u, FalsePathDB::load(*opt.fpd)).universe;
  const Netlist& rn = u.netlist();

  ReportRow row;
  row.name = circuit.name;
  row.pi_bits = rn.pis().size();
  Stimulus st;
  bool exhaustive = false;
  if (opt.stimulus) {
    st = Stimulus::load(*opt.stimulus);
    row.stimulus_source = opt.stimulus->string();
  } else if (rn.pis().size() <= 20) {
    st = gen_exhaustive(rn);
    exhaustive = true;
    row.stimulus_source = "exhaustive";
  } else if (uniform_fields(rn)) {
    st = gen_bitslice(rn, opt.bitslice_window);
    row.stimulus_source = "bitslice";
  } else {
    st = gen_random(rn, opt.random_cycles, opt.seed);
    row.stimulus_source = "random";
  }
  const auto frames = bind_stimulus(rn, st, opt.engine.lanes);
  const auto db = run_coverage(u, frames, opt.engine);
  if (exhaustive) u = mark_unreachable_auto(u, db.covered_mask());
  const auto sum = summarize(u, db);
  row.gifpo_total = sum.total;
  row.gifpo_redundant = sum.unreachable;
  row.functional_cycles = frames.frames;
  row.coverage_gifpo = sum.percent();

  const TestSet ts = greedy_select(u, frames, db);
  row.pattern_rtl = ts.size();

  SynthStyle style{opt.style, opt.seed};
  Netlist gate = lower(e, style);
  if (opt.style == StyleKind::Rewrite) {
    style.steps = default_rewrite_steps(gate);
    gate = lower(e, style);
  }
  row.style = style.label();
  std::vector<char> untestable;
  if (gate.pis().size() <= 20) {
    auto red = remove_all_redundancy(gate);
    row.tied = red.tied.size();
    gate = std::move(red.netlist);
  }
  row.nets = gate.num_nets();

  auto full = fault_simulate(gate, frames, opt.engine);
  row.curve = correlation_curve(u, db, full);
  const auto on_ts = fault_simulate(gate, ts.stimulus, opt.engine);
  row.stuckat_total = on_ts.faults.size() - on_ts.untestable();
  row.stuckat_detected = on_ts.detected();
  row.coverage_stuckat = pct(row.stuckat_detected, row.stuckat_total);
  row.pattern_netlist = compact(ts, gate, untestable, opt.engine).size();
  return row;
}

// ---- workspace ---------------------------------------------------------------

Workspace::Workspace(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) throw Error("io", "workspace '" + root_.string() + "' is not a directory");
}

fs::path Workspace::stimulus(const std::string& rel) const {
  fs::path p = fs::path(rel).lexically_normal();
  if (p.is_absolute() || p.empty() || *p.begin() == "..")
    throw Error("bad-path", "stimulus path must stay inside the workspace: '" + rel + "'");
  p = root_ / p;
  if (!fs::exists(p)) throw Error("io", "no stimulus '" + rel + "' in workspace");
  return p;
}

std::optional<fs::path> Workspace::default_stimulus() const {
  std::vector<fs::path> stims;
  for (const auto& de : fs::directory_iterator(root_))
    if (de.is_regular_file() && de.path().extension() == ".stim") stims.push_back(de.path());
  if (stims.empty()) return std::nullopt;
  std::sort(stims.begin(), stims.end(), [](const fs::path& a, const fs::path& b) {
    auto ta = fs::last_write_time(a), tb = fs::last_write_time(b);
    return ta != tb ? ta > tb : a < b;
  });
  return stims.front();
}

WorkspaceLock::WorkspaceLock(const fs::path& dir) {
  const auto p = (dir / ".gifpo.lock").string();
  fd_ = ::open(p.c_str(), O_CREAT | O_RDWR, 0644);
  if (fd_ < 0) throw Error("io", "cannot open lock file '" + p + "'");
  if (::flock(fd_, LOCK_EX) != 0) {
    ::close(fd_);
    throw Error("io", "cannot lock '" + p + "'");
  }
}

WorkspaceLock::~WorkspaceLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

Session Session::open(const fs::path& root, std::optional<std::string> stimulus, const EngineOptions& opt) {
  Workspace ws(root);
  Session s;
  s.root = root;
  s.circuit = std::make_shared<const ElaboratedCircuit>(elaborate(load_circuit(ws.design())));
  s.base = build_reduced_universe(*s.circuit);
  if (fs::exists(ws.fpd())) s.fpd = FalsePathDB::load(ws.fpd());
  s.universe = apply_fpd(s.base, s.fpd).universe;
  fs::path stim;
  if (stimulus) stim = ws.stimulus(*stimulus);
  else if (auto d = ws.default_stimulus()) stim = *d;
  s.rerun(stim, opt);
  return s;
}

void Session::rerun(const fs::path& stimulus, const EngineOptions& opt) {
  Workspace ws(root);
  manifest = RunManifest{};
  manifest.started = utc_now();
  manifest.circuit_hash = sha256_file(ws.design());
  if (fs::exists(ws.fpd())) manifest.fpd_hash = sha256_file(ws.fpd());
  Stimulus st;
  if (stimulus.empty()) {
    if (base.netlist().pis().size() > 20)
      throw Error("no-stimulus", "workspace has no .stim file and the design is too wide for exhaustive stimulus");
    st = gen_exhaustive(base.netlist());
    manifest.stimulus_hash = sha256_hex(st.serialize());
  } else {
    st = Stimulus::load(stimulus);
    manifest.stimulus_hash = sha256_file(stimulus);
  }
  universe = apply_fpd(base, fpd).universe;
  db = run_coverage(universe, st, opt);
  if (stimulus.empty()) universe = mark_unreachable_auto(universe, db.covered_mask());
  stimulus_path = stimulus;
  manifest.summary = summarize(universe, db);
  manifest.finished = utc_now();
  write_run();
}

void Session::write_run() {
  const auto dir = Workspace(root).runs() / manifest.run_id();
  fs::create_directories(dir);
  write_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  std::ostringstream cov;
  cov << "point,gate,out,m,po,status,first_cycle\n";
  for (std::size_t p = 0; p < universe.size(); ++p)
    cov << p << "," << universe.cell_name(p) << "," << universe.out_pin(p) << "," << universe.minterm(p) << ","
        << universe.po_name(p) << "," << point_status_name(universe.points[p].status) << "," << db.first_cycle(p)
        << "\n";
  write_file(dir / "coverage.csv", cov.str());
  std::ostringstream curve;
  curve << "cycle,covered,gifpo_pct\n" << std::fixed << std::setprecision(2);
  const auto c = db.curve();
  const auto s = summarize(universe, db);
  for (std::size_t t = 0; t < c.size(); ++t) curve << t << "," << c[t] << "," << pct(c[t], s.open) << "\n";
  write_file(dir / "curve.csv", curve.str());
}

std::size_t Session::add_fpd(const FpdEntry& e) {
  if (e.gate.empty() || e.out.empty() || e.m.empty() || e.po.empty())
    throw Error("malformed", "gate, out, m and po are required");
  FalsePathDB one;
  one.entries.push_back(e);
  const auto mask = db.covered_mask();
  const auto app = apply_fpd(universe, one, &mask);  // throws on covered
  if (app.matches[0] == 0) throw Error("no-match", "no GIF-PO point matches the entry");
  Workspace ws(root);
  const bool fresh = !fs::exists(ws.fpd());
  {
    std::ofstream out(ws.fpd(), std::ios::app);
    if (!out) throw Error("io", "cannot append to '" + ws.fpd().string() + "'");
    if (fresh) out << FalsePathDB::kHeader << "\n";
    out << FalsePathDB::format_entry(e) << "\n";
  }
  fpd = FalsePathDB::load(ws.fpd());
  universe = app.universe;
  manifest.fpd_hash = sha256_file(ws.fpd());
  manifest.summary = summarize(universe, db);
  return app.marked;
}

json Session::summary_json() const {
  const auto s = summarize(universe, db);
  json j;
  j["circuit"] = circuit->netlist.name;
  j["stimulus"] = stimulus_path.empty() ? std::string("<exhaustive>") : stimulus_path.filename().string();
  j["total"] = s.total;
  j["covered"] = s.covered;
  j["unreachable"] = s.unreachable;
  j["redundant"] = s.unreachable;
  j["open"] = s.open;
  j["uncovered"] = s.open - s.covered;
  j["percent"] = round2(s.percent());
  j["cycles"] = s.cycles;
  j["fpd_entries"] = fpd.entries.size();
  j["run_id"] = manifest.run_id();
  j["version"] = kToolVersion;
  return j;
}

json Session::point_json(std::size_t p) const {
  json j;
  j["id"] = p;
  j["gate"] = universe.cell_name(p);
  j["out"] = universe.out_pin(p);
  j["m"] = universe.minterm(p);
  j["po"] = universe.po_name(p);
  j["members"] = universe.members(p);
  const auto& cls = universe.classes[universe.points[p].cls];
  j["alpha"] = cls.alpha ? 1 : 0;
  const auto st = universe.points[p].status;
  j["status"] = st != PointStatus::Open ? std::string(point_status_name(st))
                                        : (db.covered(p) ? std::string("covered") : std::string("open"));
  j["first_cycle"] = db.first_cycle(p);
  const int src = universe.netlist().cells()[cls.cell].source;
  j["source"] = src >= 0 ? universe.circuit->source_gates[static_cast<std::size_t>(src)] : std::string();
  return j;
}

json Session::points_json(const std::string& status, const std::string& gate, const std::string& po,
                          std::size_t offset, std::size_t limit) const {
  if (!status.empty() && status != "open" && status != "covered" && status != "unreachable")
    throw Error("malformed", "status must be open, covered or unreachable");
  json items = json::array();
  std::size_t matched = 0;
  for (std::size_t p = 0; p < universe.size(); ++p) {
    const auto st = universe.points[p].status;
    const char* s = st != PointStatus::Open ? "unreachable" : (db.covered(p) ? "covered" : "open");
    if (!status.empty() && status != s) continue;
    if (!glob(gate, universe.cell_name(p)) || !glob(po, universe.po_name(p))) continue;
    if (matched >= offset && items.size() < limit) items.push_back(point_json(p));
    ++matched;
  }
  json j;
  j["total"] = matched;
  j["offset"] = offset;
  j["limit"] = limit;
  j["points"] = items;
  return j;
}

json Session::curve_json() const {
  const auto c = db.curve();
  const auto s = summarize(universe, db);
  // Cumulative over open points only.
  std::vector<std::uint64_t> fresh(db.cycles(), 0);
  for (std::size_t p = 0; p < universe.size(); ++p)
    if (universe.points[p].status == PointStatus::Open && db.covered(p))
      ++fresh[static_cast<std::size_t>(db.first_cycle(p))];
  json pts = json::array();
  std::uint64_t acc = 0;
  for (std::size_t t = 0; t < fresh.size(); ++t) {
    acc += fresh[t];
    pts.push_back({{"cycle", t}, {"covered", acc}, {"percent", round2(pct(acc, s.open))}});
  }
  json j;
  j["open"] = s.open;
  j["cycles"] = c.size();
  j["points"] = pts;
  return j;
}

json Session::source_json(const std::string& gate) const {
  const auto& ec = *circuit;
  json j;
  j["circuit"] = ec.source_name;
  if (gate.empty()) {
    json lines = json::array();
    for (std::size_t i = 0; i < ec.source_text.size(); ++i) {
      std::string owner;
      for (std::size_t g = 0; g < ec.source_lines.size(); ++g)
        if (ec.source_lines[g] == static_cast<int>(i) + 1) owner = ec.source_gates[g];
      lines.push_back({{"line", i + 1}, {"text", ec.source_text[i]}, {"gate", owner}});
    }
    j["lines"] = lines;
    return j;
  }
  json gates = json::array();
  for (std::size_t g = 0; g < ec.source_gates.size(); ++g) {
    if (!glob(gate, ec.source_gates[g])) continue;
    const int line = ec.source_lines[g];
    json cells = json::array();
    std::size_t points = 0, covered = 0;
    const auto& nl = universe.netlist();
    for (std::uint32_t ci = 0; ci < nl.cells().size(); ++ci) {
      if (nl.cells()[ci].source != static_cast<int>(g)) continue;
      cells.push_back(nl.cells()[ci].name);
      for (auto k = universe.cell_first_class[ci]; k < universe.cell_first_class[ci + 1]; ++k)
        for (auto p = universe.class_first_point[k]; p < universe.class_first_point[k + 1]; ++p) {
          if (universe.points[p].status != PointStatus::Open) continue;
          ++points;
          if (db.covered(p)) ++covered;
        }
    }
    const std::string text = line >= 1 && static_cast<std::size_t>(line) <= ec.source_text.size()
                                 ? ec.source_text[static_cast<std::size_t>(line) - 1]
                                 : std::string();
    gates.push_back({{"gate", ec.source_gates[g]},
                     {"line", line},
                     {"text", text},
                     {"cells", cells},
                     {"points", points},
                     {"covered", covered}});
  }
  if (gates.empty()) throw Error("no-match", "no source gate matches '" + gate + "'");
  j["gates"] = gates;
  return j;
}

// ---- HTTP service -------------------------------------------------------------

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& msg) {
  reply(res, status, json{{"error", code}, {"message", msg}});
}

int status_for(const Error& e) {
  if (e.code() == "covered-false-path") return 409;
  if (e.code() == "no-match") return 404;
  if (e.code() == "io") return 404;
  return 400;
}

std::size_t param_size(const httplib::Request& req, const char* key, std::size_t def) {
  if (!req.has_param(key)) return def;
  const auto v = req.get_param_value(key);
  std::size_t pos = 0;
  unsigned long long n = std::stoull(v, &pos);
  if (pos != v.size()) throw Error("malformed", std::string("bad ") + key);
  return static_cast<std::size_t>(n);
}

}  // namespace

void serve(const fs::path& root, const std::string& host, int port,
           const std::function<void(int, std::function<void()>)>& on_ready) {
  Session session = Session::open(root);
  std::shared_mutex mu;
  httplib::Server srv;

  auto guarded = [&](auto&& fn, bool write) {
    return [&, fn, write](const httplib::Request& req, httplib::Response& res) {
      try {
        if (write) {
          std::unique_lock lock(mu);
          WorkspaceLock wl(root);
          fn(req, res);
        } else {
          std::shared_lock lock(mu);
          fn(req, res);
        }
      } catch (const ParseError& e) {
        reply_error(res, 400, e.code(), e.what());
      } catch (const Error& e) {
        reply_error(res, status_for(e), e.code(), e.what());
      } catch (const json::exception& e) {
        reply_error(res, 400, "malformed", e.what());
      } catch (const std::invalid_argument& e) {
        reply_error(res, 400, "malformed", e.what());
      } catch (const std::out_of_range& e) {
        reply_error(res, 400, "malformed", e.what());
      }
    };
  };

  srv.Get("/api/summary", guarded([&](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, session.summary_json());
          }, false));
  srv.Get("/api/points", guarded([&](const httplib::Request& req, httplib::Response& res) {
            const auto status = req.has_param("status") ? req.get_param_value("status") : "";
            const auto gate = req.has_param("gate") ? req.get_param_value("gate") : "";
            const auto po = req.has_param("po") ? req.get_param_value("po") : "";
            const auto offset = param_size(req, "offset", 0);
            const auto limit = std::min<std::size_t>(param_size(req, "limit", 100), 10000);
            reply(res, 200, session.points_json(status, gate, po, offset, limit));
          }, false));
  srv.Get(R"(/api/points/(\d+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
            const auto id = std::stoull(req.matches[1].str());
            if (id >= session.universe.size()) throw Error("no-match", "no point " + req.matches[1].str());
            reply(res, 200, session.point_json(id));
          }, false));
  srv.Get("/api/curve", guarded([&](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, session.curve_json());
          }, false));
  srv.Get("/api/source", guarded([&](const httplib::Request& req, httplib::Response& res) {
            reply(res, 200, session.source_json(req.has_param("gate") ? req.get_param_value("gate") : ""));
          }, false));
  srv.Post("/api/fpd", guarded([&](const httplib::Request& req, httplib::Response& res) {
             const auto body = json::parse(req.body);
             if (!body.is_object()) throw Error("malformed", "expected a JSON object");
             FpdEntry e;
             auto field = [&](const char* k, bool required) {
               if (!body.contains(k)) {
                 if (required) throw Error("malformed", std::string("missing field '") + k + "'");
                 return std::string();
               }
               if (!body[k].is_string()) throw Error("malformed", std::string("field '") + k + "' must be a string");
               return body[k].get<std::string>();
             };
             e.gate = field("gate", true);
             e.out = field("out", true);
             e.m = field("m", true);
             e.po = field("po", true);
             e.reason = field("reason", false);
             e.author = field("author", false);
             const auto marked = session.add_fpd(e);
             auto j = session.summary_json();
             j["marked"] = marked;
             reply(res, 200, j);
           }, true));
  srv.Post("/api/rerun", guarded([&](const httplib::Request& req, httplib::Response& res) {
             const auto body = req.body.empty() ? json::object() : json::parse(req.body);
             if (!body.is_object()) throw Error("malformed", "expected a JSON object");
             fs::path stim;
             if (body.contains("stimulus_path")) {
               if (!body["stimulus_path"].is_string()) throw Error("malformed", "stimulus_path must be a string");
               stim = Workspace(root).stimulus(body["stimulus_path"].get<std::string>());
             } else {
               stim = session.stimulus_path;
             }
             session.rerun(stim);
             reply(res, 200, session.summary_json());
           }, true));

  int bound = port;
  if (port == 0) {
    bound = srv.bind_to_any_port(host);
  } else if (!srv.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("io", "cannot listen on " + host + ":" + std::to_string(port));
  if (on_ready) on_ready(bound, [&srv] { srv.stop(); });
  srv.listen_after_bind();
}

}  // namespace gifpo
