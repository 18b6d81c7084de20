#pragma once

#include <cstdint>
#include <string>

#include "bhs/graph.hpp"

namespace bhs {

struct FamilySpec {
  std::string kind; // ring clique path random-connected bhs1-impossibility kf2-clique
  int n = 0;
  int f = 1;
  uint64_t seed = 0;
  double extra_edge_prob = 0.25;
  Node black_hole = -1; // ignored by families with a built-in black hole
};

Footprint make_ring(int n, Node black_hole = -1);
Footprint make_clique(int n, Node black_hole = -1);
Footprint make_path(int n, Node black_hole = -1);
// Uniform spanning tree plus independent extra edges; ports permuted per node.
Footprint make_random_connected(int n, uint64_t seed, double extra_edge_prob = 0.25,
                                Node black_hole = -1);
// Black hole of degree m1 = floor(sqrt(n)) bridged to m1 cliques of size
// m2 = floor((n-1)/m1); effective node count is m1*m2+1. Black hole is node 0.
Footprint make_bhs1_gadget(int requested_n);
// K_{f+2} with node 0 as the black hole.
Footprint make_kf2_clique(int f);

// Dispatch by FamilySpec.kind; throws std::invalid_argument on bad parameters.
Footprint generate(const FamilySpec& spec);

} // namespace bhs
