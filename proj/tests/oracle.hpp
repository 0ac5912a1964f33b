#pragma once

// Scalar reference models used as test oracles. Nothing here calls the
// simulation, coverage or fault engines under test.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gifpo/bitsim.hpp"
#include "gifpo/gif.hpp"
#include "gifpo/netlist.hpp"

namespace oracle {

using gifpo::Cell;
using gifpo::CellKind;
using gifpo::NetId;
using gifpo::Netlist;

inline std::filesystem::path circuit(const std::string& name) {
  return std::filesystem::path(GIFPO_TEST_CIRCUITS) / (name + ".gnl");
}

// Output values of a cell for scalar inputs (bubbles applied).
inline std::vector<int> eval_cell(const Cell& c, const std::vector<int>& raw) {
  std::vector<int> v(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) v[i] = raw[i] ^ static_cast<int>((c.inv >> i) & 1u);
  switch (c.kind) {
    case CellKind::Const0: return {0};
    case CellKind::Const1: return {1};
    case CellKind::Buf: return {v[0]};
    case CellKind::Inv: return {!v[0]};
    case CellKind::And: {
      int r = 1;
      for (int x : v) r &= x;
      return {r};
    }
    case CellKind::Or: {
      int r = 0;
      for (int x : v) r |= x;
      return {r};
    }
    case CellKind::Xor: {
      int r = 0;
      for (int x : v) r ^= x;
      return {r};
    }
    case CellKind::Mux2: return {v[0] ? v[2] : v[1]};
    case CellKind::Ha: return {v[0] ^ v[1], v[0] & v[1]};
    case CellKind::Fa: {
      const int sum = v[0] + v[1] + v[2];
      return {sum & 1, sum >> 1};
    }
  }
  return {};
}

// Truth value of output `go` of an unbubbled cell at a local minterm
// (pin 0 is the most significant bit).
inline int eval_local(CellKind kind, int arity, std::uint32_t minterm, int go) {
  Cell c;
  c.kind = kind;
  std::vector<int> in(static_cast<std::size_t>(arity));
  for (int p = 0; p < arity; ++p) in[static_cast<std::size_t>(p)] = (minterm >> (arity - 1 - p)) & 1u;
  return eval_cell(c, in)[static_cast<std::size_t>(go)];
}

struct Values {
  std::vector<int> net;
  std::vector<int> po;
};

// Evaluates every cell by repeated sweeps until all nets are known, so the
// order does not depend on the netlist's own topological sort. An optional
// forced net is overridden wherever it is read.
inline Values simulate(const Netlist& n, const std::vector<int>& pis, std::optional<NetId> force = std::nullopt,
                       int force_value = 0) {
  std::vector<int> val(n.num_nets(), -1);
  for (std::size_t i = 0; i < n.pis().size(); ++i) val[n.pis()[i]] = pis[i];
  if (force) val[*force] = force_value;
  std::vector<char> done(n.cells().size(), 0);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t ci = 0; ci < n.cells().size(); ++ci) {
      if (done[ci]) continue;
      const auto& c = n.cells()[ci];
      std::vector<int> in;
      bool ready = true;
      for (auto x : c.in) {
        if (val[x] < 0) ready = false;
        in.push_back(val[x]);
      }
      if (!ready) continue;
      const auto out = eval_cell(c, in);
      for (std::size_t k = 0; k < c.out.size(); ++k)
        val[c.out[k]] = force && c.out[k] == *force ? force_value : out[k];
      done[ci] = 1;
      progress = true;
    }
  }
  Values v;
  v.net = val;
  for (auto p : n.pos()) v.po.push_back(val[p]);
  return v;
}

// Full PI vectors for every assignment, pis() order, bit i of the index
// drives PI i. Only the set of vectors matters to the set-based checks.
inline std::vector<std::vector<int>> all_vectors(const Netlist& n) {
  std::vector<std::vector<int>> out;
  const std::size_t k = n.pis().size();
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << k); ++idx) {
    std::vector<int> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = (idx >> i) & 1u;
    out.push_back(v);
  }
  return out;
}

// True when complementing `net` flips PO j.
inline bool observable(const Netlist& n, const std::vector<int>& pis, const Values& good, NetId net, std::size_t j) {
  const auto bad = simulate(n, pis, net, !good.net[net]);
  return bad.po[j] != good.po[j];
}

inline bool stuck_detected(const Netlist& n, const std::vector<int>& pis, const Values& good, NetId net, int v) {
  if (good.net[net] == v) return false;
  const auto bad = simulate(n, pis, net, v);
  return bad.po != good.po;
}

// First covering frame of every point, from the definition: the cell sees
// the class minterm and complementing the class output flips the PO.
inline std::vector<std::int64_t> first_cycles(const gifpo::GifPoUniverse& u, const gifpo::FrameSet& frames) {
  const auto& n = u.netlist();
  std::vector<std::int64_t> first(u.size(), -1);
  for (std::size_t t = 0; t < frames.frames; ++t) {
    const auto bits = frames.frame(t);
    std::vector<int> v(bits.begin(), bits.end());
    const auto good = oracle::simulate(n, v);
    std::vector<std::vector<int>> flipped(n.num_nets());
    for (std::size_t p = 0; p < u.size(); ++p) {
      if (first[p] >= 0 || u.points[p].status != gifpo::PointStatus::Open) continue;
      const auto& k = u.classes[u.points[p].cls];
      const auto& c = n.cells()[k.cell];
      std::uint32_t m = 0;
      for (std::size_t i = 0; i < c.in.size(); ++i)
        m = (m << 1) | static_cast<std::uint32_t>(good.net[c.in[i]] ^ static_cast<int>((c.inv >> i) & 1u));
      if (m != k.minterm) continue;
      const NetId go = c.out[k.go];
      if (flipped[go].empty()) flipped[go] = oracle::simulate(n, v, go, !good.net[go]).po;
      if (flipped[go][u.points[p].po] != good.po[u.points[p].po]) first[p] = static_cast<std::int64_t>(t);
    }
  }
  return first;
}

}  // namespace oracle
