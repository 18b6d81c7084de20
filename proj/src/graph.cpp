#include "bhs/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bhs {

uint64_t fnv1a64(const void* data, size_t len, uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

static bool reachable_all(int n, const std::vector<Edge>& edges,
                          const std::vector<char>& skip) {
  if (n <= 0) return false;
  std::vector<std::vector<int>> nbr(n);
  for (size_t i = 0; i < edges.size(); ++i) {
    if (!skip.empty() && skip[i]) continue;
    nbr[edges[i].u].push_back(edges[i].v);
    nbr[edges[i].v].push_back(edges[i].u);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : nbr[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n;
}

bool Footprint::connected() const { return reachable_all(n, edges, {}); }

bool Footprint::connected_without(const std::vector<EdgeId>& removed) const {
  std::vector<char> skip(edges.size(), 0);
  for (EdgeId e : removed) skip[e] = 1;
  return reachable_all(n, edges, skip);
}

bool Footprint::is_bridge(EdgeId e) const { return !connected_without({e}); }

std::string Footprint::serialize() const {
  std::ostringstream out;
  out << n << ' ' << m() << ' ' << black_hole << '\n';
  for (const Edge& e : edges)
    out << e.u << ' ' << e.v << ' ' << e.pu << ' ' << e.pv << '\n';
  return out.str();
}

std::string Footprint::hash() const {
  std::string text = serialize();
  uint64_t h = fnv1a64(text.data(), text.size());
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = hex[h & 0xf];
    h >>= 4;
  }
  return s;
}

std::vector<std::string> validate_footprint(int n, const std::vector<Edge>& edges,
                                            Node black_hole) {
  std::vector<std::string> bad;
  if (n < 1) {
    bad.push_back("bad-node-count");
    return bad;
  }
  std::set<std::pair<int, int>> seen;
  std::vector<std::vector<Port>> ports(n);
  bool structural = true;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      bad.push_back("node-out-of-range");
      structural = false;
      continue;
    }
    if (e.u == e.v) {
      bad.push_back("self-loop");
      structural = false;
      continue;
    }
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second) {
      bad.push_back("duplicate-edge");
      structural = false;
      continue;
    }
    ports[e.u].push_back(e.pu);
    ports[e.v].push_back(e.pv);
  }
  for (int v = 0; v < n && structural; ++v) {
    auto p = ports[v];
    std::sort(p.begin(), p.end());
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] != static_cast<Port>(i)) {
        bad.push_back(i > 0 && p[i] == p[i - 1] ? "duplicate-port" : "bad-port");
        break;
      }
    }
  }
  if (structural && !reachable_all(n, edges, {})) bad.push_back("disconnected");
  if (black_hole != -1) {
    if (black_hole < 0 || black_hole >= n)
      bad.push_back("black-hole-out-of-range");
    else if (ports[black_hole].empty())
      bad.push_back("black-hole-degree-zero");
  }
  return bad;
}

Footprint make_footprint(int n, std::vector<Edge> edges, Node black_hole) {
  for (Edge& e : edges)
    if (e.u > e.v) {
      std::swap(e.u, e.v);
      std::swap(e.pu, e.pv);
    }
  auto bad = validate_footprint(n, edges, black_hole);
  if (!bad.empty()) {
    std::string msg = "invalid footprint:";
    for (const auto& b : bad) msg += " " + b;
    throw std::invalid_argument(msg);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  Footprint fp;
  fp.n = n;
  fp.edges = std::move(edges);
  fp.black_hole = black_hole;
  fp.adj.resize(n);
  std::vector<int> deg(n, 0);
  for (const Edge& e : fp.edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  for (int v = 0; v < n; ++v) fp.adj[v].resize(deg[v]);
  for (EdgeId i = 0; i < fp.m(); ++i) {
    const Edge& e = fp.edges[i];
    fp.adj[e.u][e.pu] = HalfEdge{e.v, e.pv, i};
    fp.adj[e.v][e.pv] = HalfEdge{e.u, e.pu, i};
  }
  return fp;
}

void parse_footprint_parts(const std::string& text, int& n, std::vector<Edge>& edges,
                           Node& black_hole) {
  std::istringstream in(text);
  int m = 0;
  if (!(in >> n >> m >> black_hole)) throw std::invalid_argument("bad graph header");
  if (m < 0) throw std::invalid_argument("bad edge count");
  edges.clear();
  edges.reserve(m);
  for (int i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> e.u >> e.v >> e.pu >> e.pv))
      throw std::invalid_argument("truncated edge list");
    edges.push_back(e);
  }
}

Footprint parse_footprint(const std::string& text) {
  int n = 0;
  Node bh = -1;
  std::vector<Edge> edges;
  parse_footprint_parts(text, n, edges, bh);
  return make_footprint(n, std::move(edges), bh);
}

} // namespace bhs
