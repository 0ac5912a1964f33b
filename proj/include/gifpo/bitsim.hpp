#pragma once

// Bit-parallel frame simulation: up to 64 frames per machine word, plus
// fanout-cone re-simulation of a complemented net (exact observability).

#include <cstdint>
#include <span>
#include <vector>

#include "gifpo/netlist.hpp"

namespace gifpo {

/// One bit per frame, packed 64 per word.
using BitRow = std::vector<std::uint64_t>;

inline bool bit_test(const BitRow& r, std::size_t i) { return i / 64 < r.size() && ((r[i / 64] >> (i % 64)) & 1u); }
inline void bit_set(BitRow& r, std::size_t i) {
  if (r.size() <= i / 64) r.resize(i / 64 + 1, 0);
  r[i / 64] |= std::uint64_t{1} << (i % 64);
}

/// Frames packed block-major: block b holds frames [b*lanes, b*lanes+lanes).
struct FrameSet {
  std::size_t frames = 0;
  std::size_t num_pis = 0;
  int lanes = 64;
  std::vector<std::uint64_t> words;  // words[b * num_pis + k] = PI k of block b

  std::size_t blocks() const { return lanes == 0 ? 0 : (frames + static_cast<std::size_t>(lanes) - 1) / lanes; }
  std::uint64_t lane_mask(std::size_t block) const;
  const std::uint64_t* block(std::size_t b) const { return words.data() + b * num_pis; }

  void push(std::span<const std::uint8_t> pi_bits);
  std::vector<std::uint8_t> frame(std::size_t i) const;

  static FrameSet make(std::size_t num_pis, int lanes = 64);
  /// All 2^n assignments in ascending index order (see pi_bits_from_index).
  static FrameSet exhaustive(const Netlist& n, int lanes = 64);
};

/// Good-machine values of every net, per block.
struct GoodValues {
  std::size_t nets = 0;
  std::vector<std::uint64_t> words;
  const std::uint64_t* block(std::size_t b) const { return words.data() + b * nets; }
  std::uint64_t* block(std::size_t b) { return words.data() + b * nets; }
};

GoodValues simulate_good(const Netlist& n, const FrameSet& frames);

/// Evaluates one cell on packed words. `in(i)` returns the word on input pin i
/// (before inversion bubbles); results go to out[0..outputs).
template <class Get>
inline void eval_cell_words(const Cell& c, Get&& in, std::uint64_t* out) {
  auto pin = [&](std::size_t i) -> std::uint64_t {
    std::uint64_t v = in(i);
    return ((c.inv >> i) & 1u) ? ~v : v;
  };
  switch (c.kind) {
    case CellKind::Const0: out[0] = 0; break;
    case CellKind::Const1: out[0] = ~std::uint64_t{0}; break;
    case CellKind::Buf: out[0] = pin(0); break;
    case CellKind::Inv: out[0] = ~pin(0); break;
    case CellKind::And: {
      std::uint64_t r = ~std::uint64_t{0};
      for (std::size_t i = 0; i < c.in.size(); ++i) r &= pin(i);
      out[0] = r;
      break;
    }
    case CellKind::Or: {
      std::uint64_t r = 0;
      for (std::size_t i = 0; i < c.in.size(); ++i) r |= pin(i);
      out[0] = r;
      break;
    }
    case CellKind::Xor: {
      std::uint64_t r = 0;
      for (std::size_t i = 0; i < c.in.size(); ++i) r ^= pin(i);
      out[0] = r;
      break;
    }
    case CellKind::Mux2: {
      std::uint64_t s = pin(0);
      out[0] = (~s & pin(1)) | (s & pin(2));
      break;
    }
    case CellKind::Ha: {
      std::uint64_t a = pin(0), b = pin(1);
      out[0] = a ^ b;
      out[1] = a & b;
      break;
    }
    case CellKind::Fa: {
      std::uint64_t ci = pin(0), a = pin(1), b = pin(2);
      std::uint64_t p = a ^ b;
      out[0] = p ^ ci;
      out[1] = (a & b) | (ci & p);
      break;
    }
  }
}

/// Word mask of frames in which a cell's local input minterm equals `minterm`.
std::uint64_t minterm_mask(const Cell& c, const std::uint64_t* good, std::uint32_t minterm);

/// Re-simulates the fanout cone of one site net with the site complemented.
/// Reusable across sites; one instance per thread.
class ConeSimulator {
 public:
  explicit ConeSimulator(const Netlist& n);

  void set_site(NetId site);
  NetId site() const { return site_; }
  /// PO indices structurally reachable from the site.
  const std::vector<std::uint32_t>& reachable_pos() const { return cone_pos_; }
  const std::vector<std::uint32_t>& cone_cells() const { return cone_cells_; }

  /// Complements the site in the lanes of `flip` and propagates.
  void propagate(const std::uint64_t* good, std::uint64_t flip = ~std::uint64_t{0});
  /// Lanes where PO reachable_pos()[k] differs from the good machine.
  std::uint64_t po_diff(std::size_t k) const { return po_diff_[k]; }
  /// Union of po_diff over all reachable POs.
  std::uint64_t any_diff() const;

 private:
  const Netlist* nl_;
  NetId site_ = 0;
  std::vector<std::uint32_t> cone_cells_;
  std::vector<std::uint32_t> cone_pos_;
  std::vector<std::uint64_t> faulty_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> cell_mark_;
  std::uint32_t epoch_ = 0;
  std::uint32_t cell_epoch_ = 0;
  std::vector<std::uint64_t> po_diff_;
};

}  // namespace gifpo
