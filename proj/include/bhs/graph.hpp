#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bhs {

using Node = int;
using Port = int;
using EdgeId = int;

struct Edge {
  Node u = -1, v = -1;   // normalized u < v
  Port pu = -1, pv = -1; // port at u, port at v
};

struct HalfEdge {
  Node to = -1;
  Port rev = -1; // entry port at the far endpoint
  EdgeId edge = -1;
};

// Static footprint of the dynamic graph. Immutable once built; nodes are
// engine-level indices, agents never see them.
struct Footprint {
  int n = 0;
  std::vector<Edge> edges;                // sorted by (u, v), EdgeId = index
  std::vector<std::vector<HalfEdge>> adj; // adj[v][port]
  Node black_hole = -1;                   // -1 when absent

  int m() const { return static_cast<int>(edges.size()); }
  int degree(Node v) const { return static_cast<int>(adj[v].size()); }
  const HalfEdge& out(Node v, Port p) const { return adj[v][p]; }

  bool connected() const;
  // Connectivity of the footprint minus the given edges.
  bool connected_without(const std::vector<EdgeId>& removed) const;
  bool is_bridge(EdgeId e) const;

  // Canonical text form: "n m bh" then one "u v pu pv" line per edge.
  std::string serialize() const;
  // FNV-1a 64 over serialize(), 16 lowercase hex digits.
  std::string hash() const;
};

// Invariant check on a raw description; empty result means valid.
std::vector<std::string> validate_footprint(int n, const std::vector<Edge>& edges,
                                            Node black_hole);

// Normalizes, validates and indexes; throws std::invalid_argument on violations.
Footprint make_footprint(int n, std::vector<Edge> edges, Node black_hole = -1);

// Parses the canonical text form without validating (syntax errors still throw).
void parse_footprint_parts(const std::string& text, int& n, std::vector<Edge>& edges,
                           Node& black_hole);
// Parse + validate + build.
Footprint parse_footprint(const std::string& text);

uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 14695981039346656037ULL);

} // namespace bhs
