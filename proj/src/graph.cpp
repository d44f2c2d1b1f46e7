#include "exsamp/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "exsamp/rng.hpp"

namespace exsamp {

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n <= 0) throw std::invalid_argument("graph: vertex count must be positive");
  std::vector<std::set<int>> adj(n);
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("graph: edge endpoint out of range: (" +
                                  std::to_string(u) + "," + std::to_string(v) + ")");
    if (u == v)
      throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(u));
    adj[u].insert(v);
    adj[v].insert(u);
  }
  Graph g;
  g.offsets_.assign(1, 0);
  g.offsets_.reserve(n + 1);
  for (int v = 0; v < n; ++v) {
    g.adj_.insert(g.adj_.end(), adj[v].begin(), adj[v].end());
    g.offsets_.push_back(static_cast<int>(g.adj_.size()));
  }
  return g;
}

int Graph::max_degree() const {
  int d = 0;
  for (int v = 0; v < vertex_count(); ++v) d = std::max(d, degree(v));
  return d;
}

bool Graph::has_edge(int u, int v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<int> Graph::k_hop_ball(int v, int k) const {
  std::vector<int> dist(vertex_count(), -1);
  std::vector<int> ball{v};
  dist[v] = 0;
  std::queue<int> q;
  q.push(v);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (dist[u] == k) continue;
    for (int w : neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        ball.push_back(w);
        q.push(w);
      }
    }
  }
  std::sort(ball.begin(), ball.end());
  return ball;
}

int Graph::delta_k(int k) const {
  int best = 0;
  for (int v = 0; v < vertex_count(); ++v)
    best = std::max(best, static_cast<int>(k_hop_ball(v, k).size()) - 1);
  return best;
}

int Graph::distance(int u, int v) const {
  if (u == v) return 0;
  std::vector<int> dist(vertex_count(), -1);
  dist[u] = 0;
  std::queue<int> q;
  q.push(u);
  while (!q.empty()) {
    int w = q.front();
    q.pop();
    for (int x : neighbors(w)) {
      if (dist[x] < 0) {
        dist[x] = dist[w] + 1;
        if (x == v) return dist[x];
        q.push(x);
      }
    }
  }
  return -1;
}

int Graph::set_diameter(std::span<const int> vs) const {
  int diam = 0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      int d = distance(vs[i], vs[j]);
      if (d < 0) return -1;
      diam = std::max(diam, d);
    }
  return diam;
}

namespace {

int param_int(const std::map<std::string, std::string>& params,
              const std::string& key) {
  auto it = params.find(key);
  if (it == params.end())
    throw std::invalid_argument("graph generator: missing parameter '" + key + "'");
  return std::stoi(it->second);
}

double param_double(const std::map<std::string, std::string>& params,
                    const std::string& key) {
  auto it = params.find(key);
  if (it == params.end())
    throw std::invalid_argument("graph generator: missing parameter '" + key + "'");
  return std::stod(it->second);
}

Graph make_path(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

Graph make_cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle: n must be >= 3");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, edges);
}

Graph make_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid: bad dimensions");
  std::vector<std::pair<int, int>> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  return Graph::from_edges(rows * cols, edges);
}

// Pairing model with full restart on loops or multi-edges.
Graph make_random_regular(int n, int d, std::uint64_t seed) {
  if (d < 0 || d >= n) throw std::invalid_argument("random_regular: need 0 <= d < n");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw std::invalid_argument("random_regular: n*d must be even");
  rng::SmallRng r(rng::at(seed, 0, 0, rng::Stream::GraphGen));
  std::vector<int> stubs(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int j = 0; j < d; ++j) stubs[static_cast<std::size_t>(v) * d + j] = v;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (std::size_t i = stubs.size(); i > 1; --i)
      std::swap(stubs[i - 1], stubs[r.below(i)]);
    std::set<std::pair<int, int>> seen;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v || !seen.emplace(std::min(u, v), std::max(u, v)).second) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::vector<std::pair<int, int>> edges(seen.begin(), seen.end());
      return Graph::from_edges(n, edges);
    }
  }
  throw std::runtime_error("random_regular: pairing model failed to converge");
}

Graph make_erdos_renyi(int n, double prob, std::uint64_t seed) {
  if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("erdos_renyi: prob in [0,1]");
  rng::SmallRng r(rng::at(seed, 0, 1, rng::Stream::GraphGen));
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (r.unit() < prob) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

}  // namespace

Graph generate_graph(const std::string& family,
                     const std::map<std::string, std::string>& params,
                     std::uint64_t seed) {
  if (family == "path") return make_path(param_int(params, "n"));
  if (family == "cycle") return make_cycle(param_int(params, "n"));
  if (family == "grid") return make_grid(param_int(params, "rows"), param_int(params, "cols"));
  if (family == "random_regular")
    return make_random_regular(param_int(params, "n"), param_int(params, "d"), seed);
  if (family == "erdos_renyi")
    return make_erdos_renyi(param_int(params, "n"), param_double(params, "prob"), seed);
  throw std::invalid_argument("unknown graph family '" + family + "'");
}

Graph parse_graph_spec(const std::string& spec, std::uint64_t seed) {
  auto colon = spec.find(':');
  std::string family = spec.substr(0, colon);
  std::map<std::string, std::string> params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("graph spec: expected key=val in '" + item + "'");
      params[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  return generate_graph(family, params, seed);
}

Graph read_graph_file(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("graph file: bad header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  for (int i = 0; i < m; ++i) {
    int u = 0, v = 0;
    if (!(in >> u >> v)) throw std::runtime_error("graph file: truncated edge list");
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

void write_graph_file(const Graph& g, std::ostream& out) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (int v = 0; v < g.vertex_count(); ++v)
    for (int u : g.neighbors(v))
      if (v < u) out << v << ' ' << u << '\n';
}

}  // namespace exsamp
