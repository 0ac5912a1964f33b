#include "gifpo/coverage.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <sstream>
#include <thread>

#include "gifpo/error.hpp"
#include "text.hpp"

namespace gifpo {

// ---- stimulus ------------------------------------------------------------

Stimulus Stimulus::parse(std::string_view src) {
  Stimulus st;
  bool header = false;
  for (const auto& line : text::tokenize(src)) {
    const auto& tk = line.tokens;
    if (tk.empty()) continue;
    if (!header) {
      if (tk[0].text != "inputs") throw ParseError("syntax", "expected 'inputs' header", line.number, tk[0].column);
      for (std::size_t i = 1; i < tk.size(); ++i) {
        if (std::find(st.fields.begin(), st.fields.end(), tk[i].text) != st.fields.end())
          throw ParseError("duplicate-name", "field '" + tk[i].text + "' listed twice", line.number, tk[i].column);
        st.fields.push_back(tk[i].text);
      }
      header = true;
      continue;
    }
    if (tk.size() != st.fields.size())
      throw ParseError("width-mismatch",
                       "expected " + std::to_string(st.fields.size()) + " values, got " + std::to_string(tk.size()),
                       line.number, 0);
    std::vector<std::uint64_t> row;
    for (const auto& t : tk) {
      unsigned long long v = 0;
      if (!text::parse_hex(t.text, v, true))
        throw ParseError("syntax", "bad hex value '" + t.text + "'", line.number, t.column);
      row.push_back(v);
    }
    st.cycles.push_back(std::move(row));
  }
  if (!header) throw ParseError("syntax", "missing 'inputs' header", 1, 0);
  return st;
}

Stimulus Stimulus::load(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("io", "cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Stimulus::serialize() const {
  std::string s = "inputs";
  for (const auto& f : fields) s += " " + f;
  s += '\n';
  for (const auto& row : cycles) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? " " : "") + text::to_hex(row[i]);
    s += '\n';
  }
  return s;
}

void Stimulus::save(const std::filesystem::path& p) const {
  std::ofstream out(p);
  if (!out) throw Error("io", "cannot write '" + p.string() + "'");
  out << serialize();
}

FrameSet bind_stimulus(const Netlist& nl, const Stimulus& st, int lanes) {
  const auto& fields = nl.input_fields();
  std::vector<int> column(fields.size(), -1);
  for (std::size_t h = 0; h < st.fields.size(); ++h) {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const InputField& f) { return f.name == st.fields[h]; });
    if (it == fields.end()) throw Error("width-mismatch", "stimulus field '" + st.fields[h] + "' is not an input");
    column[static_cast<std::size_t>(it - fields.begin())] = static_cast<int>(h);
  }
  bool carried = false;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (column[f] >= 0) continue;
    if (!fields[f].is_state) throw Error("width-mismatch", "stimulus lacks input '" + fields[f].name + "'");
    carried = true;
  }
  FrameSet fs = FrameSet::make(nl.pis().size(), lanes);
  std::vector<std::uint8_t> bits(nl.pis().size(), 0);
  for (const auto& s : nl.state()) bits[static_cast<std::size_t>(nl.pi_index(s.q))] = s.init;
  for (const auto& row : st.cycles) {
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (column[f] < 0) continue;
      const std::uint64_t v = row[static_cast<std::size_t>(column[f])];
      const auto& fb = fields[f].bits;
      if (fb.size() < 64 && (v >> fb.size()) != 0)
        throw Error("width-mismatch", "value " + text::to_hex(v) + " too wide for '" + fields[f].name + "'");
      for (std::size_t k = 0; k < fb.size(); ++k) bits[fb[k]] = static_cast<std::uint8_t>((v >> k) & 1u);
    }
    fs.push(bits);
    if (carried) {
      auto fv = evaluate_frame(nl, bits);
      for (std::size_t s = 0; s < nl.state().size(); ++s)
        bits[static_cast<std::size_t>(nl.pi_index(nl.state()[s].q))] = fv.next_state[s];
    }
  }
  return fs;
}

Stimulus frames_to_stimulus(const Netlist& nl, const FrameSet& frames, std::span<const std::size_t> select) {
  Stimulus st;
  for (const auto& f : nl.input_fields()) st.fields.push_back(f.name);
  auto add = [&](std::size_t t) {
    auto bits = frames.frame(t);
    std::vector<std::uint64_t> row;
    for (const auto& f : nl.input_fields()) {
      std::uint64_t v = 0;
      for (std::size_t k = 0; k < f.bits.size(); ++k) v |= std::uint64_t{bits[f.bits[k]]} << k;
      row.push_back(v);
    }
    st.cycles.push_back(std::move(row));
  };
  if (select.empty()) {
    for (std::size_t t = 0; t < frames.frames; ++t) add(t);
  } else {
    for (auto t : select) add(t);
  }
  return st;
}

// ---- coverage database ---------------------------------------------------

void CoverageDB::record(std::size_t point, std::int64_t cycle, bool value) {
  auto& fc = first_cycle_[point];
  if (fc < 0 || cycle < fc) {
    fc = cycle;
    po_value_[point] = value ? 1 : 0;
  }
}

std::size_t CoverageDB::covered_count() const {
  return static_cast<std::size_t>(std::count_if(first_cycle_.begin(), first_cycle_.end(), [](auto c) { return c >= 0; }));
}

std::vector<char> CoverageDB::covered_mask() const {
  std::vector<char> m(first_cycle_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = first_cycle_[i] >= 0;
  return m;
}

std::vector<std::uint64_t> CoverageDB::new_per_cycle() const {
  std::vector<std::uint64_t> n(cycles_, 0);
  for (auto c : first_cycle_)
    if (c >= 0 && static_cast<std::size_t>(c) < cycles_) ++n[static_cast<std::size_t>(c)];
  return n;
}

std::vector<std::uint64_t> CoverageDB::curve() const {
  auto n = new_per_cycle();
  for (std::size_t t = 1; t < n.size(); ++t) n[t] += n[t - 1];
  return n;
}

void CoverageDB::merge(const CoverageDB& o) {
  if (o.size() != size()) throw Error("internal", "merging coverage of different universes");
  cycles_ = std::max(cycles_, o.cycles_);
  for (std::size_t i = 0; i < size(); ++i)
    if (o.first_cycle_[i] >= 0) record(i, o.first_cycle_[i], o.po_value_[i] != 0);
}

CoverageSummary summarize(const GifPoUniverse& u, const CoverageDB& db) {
  CoverageSummary s;
  s.total = u.size();
  s.open = u.open_count();
  s.unreachable = s.total - s.open;
  s.cycles = db.cycles();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.points[i].status == PointStatus::Open && db.covered(i)) ++s.covered;
  return s;
}

// ---- detection -----------------------------------------------------------

std::vector<std::uint32_t> observability(const Netlist& nl, const FrameValues& f, NetId s) {
  std::vector<std::uint64_t> good(nl.num_nets());
  for (std::size_t n = 0; n < good.size(); ++n) good[n] = f.net[n] & 1u;
  ConeSimulator cs(nl);
  cs.set_site(s);
  cs.propagate(good.data(), 1);
  std::vector<std::uint32_t> out;
  for (std::size_t k = 0; k < cs.reachable_pos().size(); ++k)
    if (cs.po_diff(k) & 1u) out.push_back(cs.reachable_pos()[k]);
  return out;
}

std::vector<std::size_t> cover_cycle(const GifPoUniverse& u, const FrameValues& f) {
  const Netlist& nl = u.netlist();
  std::vector<std::size_t> out;
  NetId cached = ~NetId{0};
  std::vector<std::uint32_t> obs;
  for (std::uint32_t k = 0; k < u.classes.size(); ++k) {
    const auto& cls = u.classes[k];
    const auto& c = nl.cells()[cls.cell];
    std::uint32_t m = 0;
    for (std::size_t p = 0; p < c.in.size(); ++p) m = (m << 1) | ((f.net[c.in[p]] ^ (c.inv >> p)) & 1u);
    if (m != cls.minterm) continue;
    NetId go = c.out[cls.go];
    if (go != cached) {
      obs = observability(nl, f, go);
      cached = go;
    }
    for (auto i = u.class_first_point[k]; i < u.class_first_point[k + 1]; ++i)
      if (u.points[i].status == PointStatus::Open && std::binary_search(obs.begin(), obs.end(), u.points[i].po))
        out.push_back(i);
  }
  return out;
}

namespace {

struct Site {
  NetId net;
  std::uint32_t cls_begin, cls_end;
};

std::vector<Site> coverage_sites(const GifPoUniverse& u) {
  std::vector<Site> sites;
  for (std::uint32_t k = 0; k < u.classes.size();) {
    const NetId net = u.go_net(k);
    std::uint32_t e = k;
    bool open = false;
    while (e < u.classes.size() && u.classes[e].cell == u.classes[k].cell && u.classes[e].go == u.classes[k].go) {
      for (auto i = u.class_first_point[e]; i < u.class_first_point[e + 1]; ++i)
        open = open || u.points[i].status == PointStatus::Open;
      ++e;
    }
    if (open) sites.push_back({net, k, e});
    k = e;
  }
  return sites;
}

void run_engine(const GifPoUniverse& u, const FrameSet& frames, const EngineOptions& opt, CoverageDB* db,
                std::vector<BitRow>* rows) {
  const Netlist& nl = u.netlist();
  const GoodValues good = simulate_good(nl, frames);
  const auto sites = coverage_sites(u);
  const std::size_t blocks = frames.blocks();
  const auto lanes = static_cast<std::size_t>(frames.lanes);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    ConeSimulator cone(nl);
    std::vector<std::uint32_t> pts, slot;
    std::vector<std::uint64_t> mm;
    for (std::size_t si = next++; si < sites.size(); si = next++) {
      const Site& site = sites[si];
      cone.set_site(site.net);
      const auto& reach = cone.reachable_pos();
      // Open points of this site with their slot in reachable_pos().
      pts.clear();
      slot.clear();
      for (auto k = site.cls_begin; k < site.cls_end; ++k)
        for (auto i = u.class_first_point[k]; i < u.class_first_point[k + 1]; ++i) {
          if (u.points[i].status != PointStatus::Open) continue;
          pts.push_back(i);
          slot.push_back(static_cast<std::uint32_t>(std::lower_bound(reach.begin(), reach.end(), u.points[i].po) -
                                                    reach.begin()));
        }
      std::size_t remaining = pts.size();
      const std::uint32_t ncls = site.cls_end - site.cls_begin;
      mm.assign(ncls, 0);
      const auto& cell = nl.cells()[u.classes[site.cls_begin].cell];
      for (std::size_t b = 0; b < blocks && (rows || remaining > 0); ++b) {
        const std::uint64_t* g = good.block(b);
        const std::uint64_t lm = frames.lane_mask(b);
        bool any = false;
        for (std::uint32_t c = 0; c < ncls; ++c) {
          mm[c] = minterm_mask(cell, g, u.classes[site.cls_begin + c].minterm) & lm;
          any = any || mm[c];
        }
        if (!any) continue;
        cone.propagate(g);
        std::size_t pi = 0;
        for (std::uint32_t c = 0; c < ncls; ++c) {
          const auto k = site.cls_begin + c;
          for (auto i = u.class_first_point[k]; i < u.class_first_point[k + 1]; ++i) {
            if (u.points[i].status != PointStatus::Open) continue;
            const std::size_t j = pi++;
            const std::uint64_t det = mm[c] & cone.po_diff(slot[j]);
            if (!det) continue;
            if (rows) {
              auto& r = (*rows)[i];
              if (lanes == 64) {
                if (r.size() <= b) r.resize(blocks, 0);
                r[b] = det;
              } else {
                for (std::uint64_t d = det; d; d &= d - 1)
                  bit_set(r, b * lanes + static_cast<std::size_t>(std::countr_zero(d)));
              }
            }
            if (db && !db->covered(i)) {
              const int lane = std::countr_zero(det);
              const NetId po = nl.pos()[u.points[i].po];
              db->record(i, static_cast<std::int64_t>(b * lanes + static_cast<std::size_t>(lane)),
                         ((g[po] >> lane) & 1u) != 0);
              --remaining;
            }
          }
        }
      }
    }
  };

  const unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(sites.size())));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
}

}  // namespace

CoverageDB run_coverage(const GifPoUniverse& u, const FrameSet& frames, const EngineOptions& opt) {
  CoverageDB db(u.size());
  db.set_cycles(frames.frames);
  run_engine(u, frames, opt, &db, nullptr);
  return db;
}

CoverageDB run_coverage(const GifPoUniverse& u, const Stimulus& st, const EngineOptions& opt) {
  return run_coverage(u, bind_stimulus(u.netlist(), st, opt.lanes), opt);
}

std::vector<BitRow> coverage_rows(const GifPoUniverse& u, const FrameSet& frames, const EngineOptions& opt) {
  std::vector<BitRow> rows(u.size());
  run_engine(u, frames, opt, nullptr, &rows);
  return rows;
}

}  // namespace gifpo
