#include "gifpo/tpg.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "gifpo/circuit.hpp"
#include "gifpo/error.hpp"
#include "gifpo/stuckat.hpp"
#include "json.hpp"

namespace gifpo {

namespace {

Stimulus empty_stimulus(const Netlist& n) {
  Stimulus st;
  for (const auto& f : n.input_fields()) st.fields.push_back(f.name);
  return st;
}

int field_width(const InputField& f) { return static_cast<int>(f.bits.size()); }

}  // namespace

Stimulus gen_exhaustive(const Netlist& n) {
  if (n.pis().size() > 20)
    throw Error("too-wide", "exhaustive stimulus needs <= 20 input bits, have " + std::to_string(n.pis().size()));
  return frames_to_stimulus(n, FrameSet::exhaustive(n));
}

Stimulus gen_random(const Netlist& n, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error("arity", "cycle count must be at least 1");
  Stimulus st = empty_stimulus(n);
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<std::uint64_t> row;
    for (const auto& f : n.input_fields()) row.push_back(rng() & width_mask(field_width(f)));
    st.cycles.push_back(std::move(row));
  }
  return st;
}

Stimulus gen_weighted(const Netlist& n, std::size_t count, std::uint64_t seed, std::span<const double> weights) {
  if (count == 0) throw Error("arity", "cycle count must be at least 1");
  if (weights.size() != 1 && weights.size() != n.pis().size())
    throw Error("arity", "expected 1 or " + std::to_string(n.pis().size()) + " weights");
  Stimulus st = empty_stimulus(n);
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<std::uint64_t> row;
    for (const auto& f : n.input_fields()) {
      std::uint64_t v = 0;
      for (std::size_t k = 0; k < f.bits.size(); ++k) {
        const double w = weights.size() == 1 ? weights[0] : weights[f.bits[k]];
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < w) v |= std::uint64_t{1} << k;
      }
      row.push_back(v);
    }
    st.cycles.push_back(std::move(row));
  }
  return st;
}

Stimulus gen_bitslice(const Netlist& n, int window, std::span<const std::uint64_t> background) {
  Stimulus st = empty_stimulus(n);
  std::vector<std::size_t> slots;  // non-state fields
  int width = 0;
  for (std::size_t i = 0; i < n.input_fields().size(); ++i) {
    const auto& f = n.input_fields()[i];
    if (f.is_state) continue;
    slots.push_back(i);
    width = std::max(width, field_width(f));
  }
  if (window < 1) throw Error("arity", "window must be at least 1");
  window = std::min(window, width);
  const int free_bits = window * static_cast<int>(slots.size());
  if (free_bits > 20) throw Error("too-wide", "bitslice window spans more than 20 bits");
  std::vector<std::uint64_t> base(n.input_fields().size(), 0);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& f = n.input_fields()[slots[s]];
    const std::uint64_t def = s == 0 ? ~std::uint64_t{0} : 0;
    base[slots[s]] = (s < background.size() ? background[s] : def) & width_mask(field_width(f));
  }
  for (const auto& f : n.input_fields())
    if (f.is_state) {
      // Registers start from their init value.
      std::uint64_t v = 0;
      for (std::size_t k = 0; k < f.bits.size(); ++k) {
        const NetId q = n.pis()[f.bits[k]];
        for (const auto& sb : n.state())
          if (sb.q == q && sb.init) v |= std::uint64_t{1} << k;
      }
      base[static_cast<std::size_t>(&f - n.input_fields().data())] = v;
    }
  for (int k = 0; k + window <= width; ++k) {
    const std::uint64_t win = width_mask(window) << k;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << free_bits); ++a) {
      auto row = base;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const std::uint64_t part = (a >> (window * static_cast<int>(s))) & width_mask(window);
        const auto wmask = width_mask(field_width(n.input_fields()[slots[s]]));
        row[slots[s]] = ((row[slots[s]] & ~win) | (part << k)) & wmask;
      }
      st.cycles.push_back(std::move(row));
    }
  }
  return st;
}

std::string_view metric_name(Metric m) { return m == Metric::GifPo ? "gifpo" : "stuckat"; }

Metric metric_from_name(std::string_view s) {
  if (s == "gifpo") return Metric::GifPo;
  if (s == "stuckat") return Metric::StuckAt;
  throw Error("unknown-metric", "unknown metric '" + std::string(s) + "' (gifpo|stuckat)");
}

TestSet greedy_select(const GifPoUniverse& u, const FrameSet& frames, const CoverageDB& db) {
  const auto fresh = db.new_per_cycle();
  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < fresh.size(); ++t)
    if (fresh[t] > 0) keep.push_back(t);
  TestSet ts;
  ts.stimulus = frames_to_stimulus(u.netlist(), frames, keep);
  if (keep.empty()) ts.stimulus.cycles.clear();
  ts.origin.assign(keep.begin(), keep.end());
  ts.metric = Metric::GifPo;
  const auto s = summarize(u, db);
  ts.covered = s.covered;
  ts.total = s.open;
  return ts;
}

TestSet greedy_select(const GifPoUniverse& u, const Stimulus& st, const EngineOptions& opt) {
  const auto frames = bind_stimulus(u.netlist(), st, opt.lanes);
  return greedy_select(u, frames, run_coverage(u, frames, opt));
}

std::vector<std::size_t> compact_cycles(const std::vector<BitRow>& rows, std::size_t cycles) {
  // Per-cycle target lists.
  std::vector<std::vector<std::uint32_t>> hits(cycles);
  std::vector<char> live(rows.size(), 0);
  for (std::uint32_t r = 0; r < rows.size(); ++r)
    for (std::size_t t = 0; t < cycles; ++t)
      if (bit_test(rows[r], t)) {
        hits[t].push_back(r);
        live[r] = 1;
      }
  std::vector<char> done(rows.size(), 0);
  std::vector<std::size_t> gain(cycles);
  for (std::size_t t = 0; t < cycles; ++t) gain[t] = hits[t].size();
  std::vector<std::size_t> chosen;
  std::vector<char> taken(cycles, 0);
  for (;;) {
    std::size_t best = cycles, best_gain = 0;
    for (std::size_t t = 0; t < cycles; ++t)
      if (!taken[t] && gain[t] > best_gain) {
        best = t;
        best_gain = gain[t];
      }
    if (best == cycles) break;
    taken[best] = 1;
    chosen.push_back(best);
    for (auto r : hits[best]) {
      if (done[r]) continue;
      done[r] = 1;
      for (std::size_t t = 0; t < cycles; ++t)
        if (bit_test(rows[r], t)) --gain[t];
    }
  }
  // Reverse-order elimination.
  std::vector<std::uint32_t> count(rows.size(), 0);
  for (auto t : chosen)
    for (auto r : hits[t]) ++count[r];
  std::vector<char> keep(cycles, 0);
  for (auto t : chosen) keep[t] = 1;
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    const auto t = *it;
    bool needed = false;
    for (auto r : hits[t]) needed = needed || count[r] == 1;
    if (needed) continue;
    keep[t] = 0;
    for (auto r : hits[t]) --count[r];
  }
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < cycles; ++t)
    if (keep[t]) out.push_back(t);
  return out;
}

TestSet subset(const TestSet& ts, std::span<const std::size_t> keep) {
  TestSet out;
  out.stimulus.fields = ts.stimulus.fields;
  out.metric = ts.metric;
  out.covered = ts.covered;
  out.total = ts.total;
  for (auto t : keep) {
    out.stimulus.cycles.push_back(ts.stimulus.cycles.at(t));
    out.origin.push_back(t < ts.origin.size() ? ts.origin[t] : t);
  }
  return out;
}

TestSet compact(const TestSet& ts, const GifPoUniverse& u, const EngineOptions& opt) {
  const auto frames = bind_stimulus(u.netlist(), ts.stimulus, opt.lanes);
  const auto rows = coverage_rows(u, frames, opt);
  auto keep = compact_cycles(rows, frames.frames);
  TestSet out = subset(ts, keep);
  out.metric = Metric::GifPo;
  out.total = u.open_count();
  out.covered = 0;
  for (const auto& r : rows)
    if (std::any_of(r.begin(), r.end(), [](std::uint64_t w) { return w != 0; })) ++out.covered;
  return out;
}

TestSet compact(const TestSet& ts, const Netlist& gate, const std::vector<char>& untestable,
                const EngineOptions& opt) {
  const auto frames = bind_stimulus(gate, ts.stimulus, opt.lanes);
  auto rows = fault_rows(gate, frames, opt);
  std::size_t excluded = 0;
  for (std::size_t f = 0; f < rows.size(); ++f)
    if (f < untestable.size() && untestable[f]) {
      rows[f].clear();
      ++excluded;
    }
  auto keep = compact_cycles(rows, frames.frames);
  TestSet out = subset(ts, keep);
  out.metric = Metric::StuckAt;
  out.total = rows.size() - excluded;
  out.covered = 0;
  for (const auto& r : rows)
    if (std::any_of(r.begin(), r.end(), [](std::uint64_t w) { return w != 0; })) ++out.covered;
  return out;
}

std::string test_set_manifest(const TestSet& ts) {
  nlohmann::ordered_json j;
  j["metric"] = metric_name(ts.metric);
  j["cycles"] = ts.size();
  j["fields"] = ts.stimulus.fields;
  j["origin"] = ts.origin;
  j["covered"] = ts.covered;
  j["total"] = ts.total;
  j["coverage"] = ts.percent();
  if (ts.size() == 0) j["coverage"] = 0.0;
  return j.dump(2) + "\n";
}

void export_test_set(const TestSet& ts, const std::filesystem::path& base, const std::string& format) {
  if (format != "stim" && format != "json" && format != "both")
    throw Error("unknown-format", "unknown export format '" + format + "' (stim|json)");
  auto with_ext = [&](const char* ext) {
    auto p = base;
    p += ext;
    return p;
  };
  if (format != "json") ts.stimulus.save(with_ext(".stim"));
  if (format != "stim") {
    std::ofstream out(with_ext(".json"));
    if (!out) throw Error("io", "cannot write " + with_ext(".json").string());
    out << test_set_manifest(ts);
  }
}

}  // namespace gifpo
