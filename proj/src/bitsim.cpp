#include "gifpo/bitsim.hpp"

#include <algorithm>

#include "gifpo/error.hpp"

namespace gifpo {

std::uint64_t FrameSet::lane_mask(std::size_t block) const {
  std::size_t first = block * static_cast<std::size_t>(lanes);
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(lanes), frames - first);
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

FrameSet FrameSet::make(std::size_t num_pis, int lanes) {
  if (lanes < 1 || lanes > 64) throw Error("internal", "lanes must be in 1..64");
  FrameSet f;
  f.num_pis = num_pis;
  f.lanes = lanes;
  return f;
}

void FrameSet::push(std::span<const std::uint8_t> pi_bits) {
  if (pi_bits.size() != num_pis) throw Error("width-mismatch", "frame width does not match PI count");
  const std::size_t lane = frames % static_cast<std::size_t>(lanes);
  if (lane == 0) words.resize(words.size() + num_pis, 0);
  std::uint64_t* blk = words.data() + (frames / static_cast<std::size_t>(lanes)) * num_pis;
  for (std::size_t k = 0; k < num_pis; ++k)
    if (pi_bits[k] & 1) blk[k] |= std::uint64_t{1} << lane;
  ++frames;
}

std::vector<std::uint8_t> FrameSet::frame(std::size_t i) const {
  std::vector<std::uint8_t> bits(num_pis);
  const std::uint64_t* blk = block(i / static_cast<std::size_t>(lanes));
  const std::size_t lane = i % static_cast<std::size_t>(lanes);
  for (std::size_t k = 0; k < num_pis; ++k) bits[k] = static_cast<std::uint8_t>((blk[k] >> lane) & 1u);
  return bits;
}

FrameSet FrameSet::exhaustive(const Netlist& n, int lanes) {
  const auto npis = n.pis().size();
  if (npis > 24) throw Error("too-wide", "exhaustive enumeration limited to 24 PI bits");
  auto pos = pi_index_positions(n);
  FrameSet f = make(npis, lanes);
  f.frames = std::size_t{1} << npis;
  f.words.assign(f.blocks() * npis, 0);
  for (std::size_t b = 0; b < f.blocks(); ++b) {
    const std::uint64_t base = b * static_cast<std::uint64_t>(lanes);
    std::uint64_t* blk = f.words.data() + b * npis;
    for (std::size_t k = 0; k < npis; ++k) {
      std::uint64_t w = 0;
      for (int l = 0; l < lanes; ++l) {
        std::uint64_t idx = base + static_cast<std::uint64_t>(l);
        if (idx >= f.frames) break;
        w |= ((idx >> pos[k]) & 1u) << l;
      }
      blk[k] = w;
    }
  }
  return f;
}

GoodValues simulate_good(const Netlist& nl, const FrameSet& frames) {
  if (frames.num_pis != nl.pis().size()) throw Error("width-mismatch", "frame width does not match PI count");
  GoodValues g;
  g.nets = nl.num_nets();
  g.words.assign(frames.blocks() * g.nets, 0);
  std::uint64_t out[2];
  for (std::size_t b = 0; b < frames.blocks(); ++b) {
    std::uint64_t* v = g.block(b);
    const std::uint64_t* pi = frames.block(b);
    for (std::size_t k = 0; k < nl.pis().size(); ++k) v[nl.pis()[k]] = pi[k];
    for (auto ci : nl.topo()) {
      const auto& c = nl.cells()[ci];
      eval_cell_words(c, [&](std::size_t i) { return v[c.in[i]]; }, out);
      for (std::size_t o = 0; o < c.out.size(); ++o) v[c.out[o]] = out[o];
    }
  }
  return g;
}

std::uint64_t minterm_mask(const Cell& c, const std::uint64_t* good, std::uint32_t minterm) {
  const std::size_t arity = c.in.size();
  std::uint64_t m = ~std::uint64_t{0};
  for (std::size_t p = 0; p < arity; ++p) {
    std::uint64_t v = good[c.in[p]];
    if ((c.inv >> p) & 1u) v = ~v;
    bool want = (minterm >> (arity - 1 - p)) & 1u;
    m &= want ? v : ~v;
  }
  return m;
}

ConeSimulator::ConeSimulator(const Netlist& n)
    : nl_(&n), faulty_(n.num_nets(), 0), stamp_(n.num_nets(), 0), cell_mark_(n.cells().size(), 0) {}

void ConeSimulator::set_site(NetId site) {
  site_ = site;
  ++cell_epoch_;
  cone_cells_.clear();
  cone_pos_.clear();
  std::vector<NetId> stack{site};
  for (auto j : nl_->po_indices(site)) cone_pos_.push_back(j);
  while (!stack.empty()) {
    NetId n = stack.back();
    stack.pop_back();
    for (const auto& s : nl_->fanout(n)) {
      if (cell_mark_[s.cell] == cell_epoch_) continue;
      cell_mark_[s.cell] = cell_epoch_;
      cone_cells_.push_back(s.cell);
      for (NetId o : nl_->cells()[s.cell].out) {
        for (auto j : nl_->po_indices(o)) cone_pos_.push_back(j);
        stack.push_back(o);
      }
    }
  }
  std::sort(cone_cells_.begin(), cone_cells_.end(),
            [&](auto a, auto b) { return nl_->topo_rank(a) < nl_->topo_rank(b); });
  std::sort(cone_pos_.begin(), cone_pos_.end());
  cone_pos_.erase(std::unique(cone_pos_.begin(), cone_pos_.end()), cone_pos_.end());
  po_diff_.assign(cone_pos_.size(), 0);
}

void ConeSimulator::propagate(const std::uint64_t* good, std::uint64_t flip) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  const std::uint32_t e = epoch_;
  faulty_[site_] = good[site_] ^ flip;
  stamp_[site_] = e;
  std::uint64_t out[2];
  for (auto ci : cone_cells_) {
    const auto& c = nl_->cells()[ci];
    bool touched = false;
    for (NetId i : c.in) touched = touched || stamp_[i] == e;
    if (!touched) continue;
    eval_cell_words(c, [&](std::size_t i) { NetId n = c.in[i]; return stamp_[n] == e ? faulty_[n] : good[n]; }, out);
    for (std::size_t o = 0; o < c.out.size(); ++o) {
      NetId n = c.out[o];
      if (out[o] != good[n]) {
        faulty_[n] = out[o];
        stamp_[n] = e;
      }
    }
  }
  const auto& pos = nl_->pos();
  for (std::size_t k = 0; k < cone_pos_.size(); ++k) {
    NetId n = pos[cone_pos_[k]];
    po_diff_[k] = stamp_[n] == e ? (faulty_[n] ^ good[n]) : 0;
  }
}

std::uint64_t ConeSimulator::any_diff() const {
  std::uint64_t m = 0;
  for (auto d : po_diff_) m |= d;
  return m;
}

}  // namespace gifpo
