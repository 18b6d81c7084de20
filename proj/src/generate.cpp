#include "bhs/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bhs/rng.hpp"

namespace bhs {

// Assigns ports by ascending neighbor id at every node.
static Footprint from_pairs(int n, const std::vector<std::pair<int, int>>& pairs,
                            Node black_hole) {
  std::vector<std::vector<int>> nbr(n);
  for (auto [u, v] : pairs) {
    nbr[u].push_back(v);
    nbr[v].push_back(u);
  }
  for (auto& list : nbr) std::sort(list.begin(), list.end());
  auto port_of = [&](int v, int w) {
    auto it = std::lower_bound(nbr[v].begin(), nbr[v].end(), w);
    return static_cast<Port>(it - nbr[v].begin());
  };
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) edges.push_back({u, v, port_of(u, v), port_of(v, u)});
  return make_footprint(n, std::move(edges), black_hole);
}

Footprint make_ring(int n, Node black_hole) {
  if (n < 3) throw std::invalid_argument("ring needs n >= 3");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) pairs.emplace_back(i, (i + 1) % n);
  return from_pairs(n, pairs, black_hole);
}

Footprint make_clique(int n, Node black_hole) {
  if (n < 2) throw std::invalid_argument("clique needs n >= 2");
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  return from_pairs(n, pairs, black_hole);
}

Footprint make_path(int n, Node black_hole) {
  if (n < 2) throw std::invalid_argument("path needs n >= 2");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return from_pairs(n, pairs, black_hole);
}

// Prufer decode; sequences drawn uniformly give uniform labeled trees.
static std::vector<std::pair<int, int>> random_tree(int n, Rng& rng) {
  std::vector<std::pair<int, int>> pairs;
  if (n == 2) {
    pairs.emplace_back(0, 1);
    return pairs;
  }
  std::vector<int> seq(n - 2);
  for (int& s : seq) s = static_cast<int>(rng.below(n));
  std::vector<int> deg(n, 1);
  for (int s : seq) ++deg[s];
  std::vector<char> used(n, 0);
  for (int s : seq) {
    int leaf = -1;
    for (int v = 0; v < n; ++v)
      if (deg[v] == 1 && !used[v]) {
        leaf = v;
        break;
      }
    pairs.emplace_back(leaf, s);
    used[leaf] = 1;
    --deg[s];
  }
  int a = -1, b = -1;
  for (int v = 0; v < n; ++v)
    if (deg[v] == 1 && !used[v]) (a < 0 ? a : b) = v;
  pairs.emplace_back(a, b);
  return pairs;
}

Footprint make_random_connected(int n, uint64_t seed, double extra_edge_prob,
                                Node black_hole) {
  if (n < 2) throw std::invalid_argument("random-connected needs n >= 2");
  Rng rng(seed);
  auto pairs = random_tree(n, rng);
  std::vector<std::vector<char>> have(n, std::vector<char>(n, 0));
  for (auto [u, v] : pairs) have[u][v] = have[v][u] = 1;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (have[u][v]) continue;
      if (rng.unit() < extra_edge_prob) {
        pairs.emplace_back(u, v);
        have[u][v] = have[v][u] = 1;
      }
    }
  // Ascending-neighbor ports, then a seeded per-node permutation.
  std::vector<std::vector<int>> nbr(n);
  for (auto [u, v] : pairs) {
    nbr[u].push_back(v);
    nbr[v].push_back(u);
  }
  std::vector<std::vector<Port>> perm(n);
  for (int v = 0; v < n; ++v) {
    std::sort(nbr[v].begin(), nbr[v].end());
    perm[v].resize(nbr[v].size());
    std::iota(perm[v].begin(), perm[v].end(), 0);
    rng.shuffle(perm[v]);
  }
  auto port_of = [&](int v, int w) {
    auto it = std::lower_bound(nbr[v].begin(), nbr[v].end(), w);
    return perm[v][it - nbr[v].begin()];
  };
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v, port_of(u, v), port_of(v, u)});
  return make_footprint(n, std::move(edges), black_hole);
}

Footprint make_bhs1_gadget(int requested_n) {
  int m1 = static_cast<int>(std::sqrt(static_cast<double>(requested_n)));
  while ((m1 + 1) * (m1 + 1) <= requested_n) ++m1;
  while (m1 * m1 > requested_n) --m1;
  int m2 = m1 > 0 ? (requested_n - 1) / m1 : 0;
  if (m1 < 2 || m2 < 2)
    throw std::invalid_argument("gadget needs floor(sqrt(n)) >= 2 and floor((n-1)/m1) >= 2");
  int n = m1 * m2 + 1; // effective size; node 0 is the black hole
  std::vector<Edge> edges;
  for (int c = 0; c < m1; ++c) {
    int base = 1 + c * m2; // lowest node of clique c, carries the bridge
    edges.push_back({0, base, c, static_cast<Port>(m2 - 1)});
    // Intra-clique ports by ascending local neighbor order.
    for (int i = 0; i < m2; ++i)
      for (int j = i + 1; j < m2; ++j) {
        Port pi = static_cast<Port>(j - 1); // j's rank among i's clique neighbors
        Port pj = static_cast<Port>(i);
        edges.push_back({base + i, base + j, pi, pj});
      }
  }
  return make_footprint(n, std::move(edges), 0);
}

Footprint make_kf2_clique(int f) {
  if (f < 1) throw std::invalid_argument("kf2-clique needs f >= 1");
  return make_clique(f + 2, 0);
}

Footprint generate(const FamilySpec& spec) {
  if (spec.kind == "ring") return make_ring(spec.n, spec.black_hole);
  if (spec.kind == "clique") return make_clique(spec.n, spec.black_hole);
  if (spec.kind == "path") return make_path(spec.n, spec.black_hole);
  if (spec.kind == "random-connected")
    return make_random_connected(spec.n, spec.seed, spec.extra_edge_prob, spec.black_hole);
  if (spec.kind == "bhs1-impossibility") return make_bhs1_gadget(spec.n);
  if (spec.kind == "kf2-clique") return make_kf2_clique(spec.f);
  throw std::invalid_argument("unknown graph family: " + spec.kind);
}

} // namespace bhs
