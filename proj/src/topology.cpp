#include "fonplan/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace fon::topo {

int Network::node_id(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return static_cast<int>(i);
  return -1;
}

int Network::link_between(int u, int v) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if ((links[i].u == u && links[i].v == v) ||
        (links[i].u == v && links[i].v == u))
      return static_cast<int>(i);
  }
  return -1;
}

bool Route::uses_link(int link_id) const {
  return std::find(link_ids.begin(), link_ids.end(), link_id) != link_ids.end();
}

Network load_topology(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open topology file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("topology parse error in " + path + ": " + e.what());
  }

  Network net;
  for (const auto& n : j.at("nodes")) net.nodes.push_back(n.get<std::string>());
  net.span_km = j.at("span_km").get<double>();
  net.f_grid_ghz = j.at("f_grid_ghz").get<double>();
  net.w = j.at("W").get<int>();
  net.w_cur = j.value("W_cur", net.w);
  net.scale_factor = j.value("scale_factor", 1.0);
  if (net.span_km <= 0 || net.f_grid_ghz <= 0 || net.w <= 0)
    throw std::runtime_error("topology " + path + ": span_km, f_grid_ghz and W must be positive");
  if (net.w_cur < 1 || net.w_cur > net.w)
    throw std::runtime_error("topology " + path + ": W_cur must lie in [1, W]");

  std::set<std::pair<int, int>> seen;
  for (const auto& lj : j.at("links")) {
    Link l;
    l.u = net.node_id(lj.at("u").get<std::string>());
    l.v = net.node_id(lj.at("v").get<std::string>());
    if (l.u < 0 || l.v < 0)
      throw std::runtime_error("topology " + path + ": link endpoint not in node list");
    if (l.u == l.v)
      throw std::runtime_error("topology " + path + ": self-loop link");
    l.length_km = lj.at("length_km").get<double>() * net.scale_factor;
    if (l.length_km <= 0)
      throw std::runtime_error("topology " + path + ": nonpositive link length");
    auto key = std::minmax(l.u, l.v);
    if (!seen.insert({key.first, key.second}).second)
      throw std::runtime_error("topology " + path + ": duplicate link");
    l.n_spans = static_cast<int>(std::ceil(l.length_km / net.span_km - 1e-12));
    if (l.n_spans < 1) l.n_spans = 1;
    net.links.push_back(l);
  }
  return net;
}

namespace {

struct Label {
  double dist = 0.0;
  std::vector<int> path;  // node sequence from source
  bool set = false;
};

bool path_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Shortest path under (length, lexicographic node sequence) order, with some
// nodes and links masked out.  Small graphs, so a simple relaxation fixpoint
// is plenty.
bool best_path(const Network& net, int s, int d,
               const std::vector<char>& node_ok,
               const std::vector<char>& link_ok, std::vector<int>& out_nodes,
               double& out_len) {
  const int n = static_cast<int>(net.nodes.size());
  std::vector<Label> lab(n);
  lab[s].set = true;
  lab[s].path = {s};
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t li = 0; li < net.links.size(); ++li) {
      if (!link_ok[li]) continue;
      const Link& l = net.links[li];
      for (int dir = 0; dir < 2; ++dir) {
        int a = dir ? l.v : l.u;
        int b = dir ? l.u : l.v;
        if (!node_ok[a] || !node_ok[b] || !lab[a].set) continue;
        // Loopless: skip if b already on a's path.
        if (std::find(lab[a].path.begin(), lab[a].path.end(), b) !=
            lab[a].path.end())
          continue;
        double nd = lab[a].dist + l.length_km;
        std::vector<int> np = lab[a].path;
        np.push_back(b);
        if (!lab[b].set || nd < lab[b].dist - 1e-9 ||
            (std::fabs(nd - lab[b].dist) <= 1e-9 && path_less(np, lab[b].path))) {
          lab[b].set = true;
          lab[b].dist = nd;
          lab[b].path = std::move(np);
          changed = true;
        }
      }
    }
  }
  if (!lab[d].set) return false;
  out_nodes = lab[d].path;
  out_len = lab[d].dist;
  return true;
}

Route make_route(const Network& net, int s, int d, const std::vector<int>& nodes) {
  Route r;
  r.s = s;
  r.d = d;
  r.node_seq = nodes;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    int li = net.link_between(nodes[i], nodes[i + 1]);
    if (li < 0) throw std::logic_error("route references missing link");
    r.link_ids.push_back(li);
    r.length_km += net.links[li].length_km;
    r.n_spans += net.links[li].n_spans;
  }
  return r;
}

}  // namespace

std::vector<Route> k_shortest_paths(const Network& net, int s, int d, int K) {
  if (s == d) throw std::invalid_argument("k_shortest_paths: s == d");
  if (K < 1) throw std::invalid_argument("k_shortest_paths: K < 1");
  const int n = static_cast<int>(net.nodes.size());
  std::vector<char> all_nodes(n, 1), all_links(net.links.size(), 1);

  std::vector<std::vector<int>> accepted;  // node sequences
  std::vector<double> accepted_len;
  {
    std::vector<int> p;
    double len;
    if (!best_path(net, s, d, all_nodes, all_links, p, len)) return {};
    accepted.push_back(p);
    accepted_len.push_back(len);
  }

  // Yen's candidate pool, kept sorted by (length, node sequence).
  std::vector<std::pair<double, std::vector<int>>> pool;
  auto pool_has = [&](const std::vector<int>& p) {
    for (auto& [len, q] : pool)
      if (q == p) return true;
    return false;
  };

  while (static_cast<int>(accepted.size()) < K) {
    const std::vector<int>& prev = accepted.back();
    for (std::size_t spur = 0; spur + 1 < prev.size(); ++spur) {
      std::vector<int> root(prev.begin(), prev.begin() + spur + 1);
      std::vector<char> node_ok(all_nodes), link_ok(all_links);
      // Mask links that would reproduce an already accepted path.
      for (const auto& ap : accepted) {
        if (ap.size() > spur + 1 &&
            std::equal(root.begin(), root.end(), ap.begin())) {
          int li = net.link_between(ap[spur], ap[spur + 1]);
          if (li >= 0) link_ok[li] = 0;
        }
      }
      // Mask root nodes except the spur node.
      for (std::size_t i = 0; i < spur; ++i) node_ok[root[i]] = 0;

      std::vector<int> tail;
      double tail_len;
      if (!best_path(net, prev[spur], d, node_ok, link_ok, tail, tail_len))
        continue;
      std::vector<int> full = root;
      full.insert(full.end(), tail.begin() + 1, tail.end());
      double full_len = 0.0;
      for (std::size_t i = 0; i + 1 < full.size(); ++i)
        full_len += net.links[net.link_between(full[i], full[i + 1])].length_km;
      bool dup = pool_has(full);
      for (const auto& ap : accepted) dup |= (ap == full);
      if (!dup) pool.emplace_back(full_len, std::move(full));
    }
    if (pool.empty()) break;
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return path_less(a.second, b.second);
    });
    accepted.push_back(std::move(pool.front().second));
    accepted_len.push_back(pool.front().first);
    pool.erase(pool.begin());
  }

  std::vector<Route> out;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    Route r = make_route(net, s, d, accepted[i]);
    r.k = static_cast<int>(i) + 1;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Channel> enumerate_channels(int b_slots, int w_cur) {
  std::vector<Channel> out;
  if (b_slots < 1) throw std::invalid_argument("enumerate_channels: b_slots < 1");
  for (int s = 1; s + b_slots - 1 <= w_cur; ++s) out.push_back({s, b_slots});
  return out;
}

}  // namespace fon::topo
