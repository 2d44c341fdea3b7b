#pragma once

#include <string>
#include <vector>

// Network graph, candidate routes, and spectrum-grid bookkeeping.  Links are
// undirected; spectrum occupancy is tracked per undirected link.  Slot
// indices are 1-based throughout.

namespace fon::topo {

struct Link {
  int u = -1;
  int v = -1;
  double length_km = 0.0;
  int n_spans = 0;  // ceil(length / span_km)
};

struct Network {
  std::vector<std::string> nodes;
  std::vector<Link> links;
  double span_km = 100.0;
  double f_grid_ghz = 12.5;
  int w = 0;      // slots per link
  int w_cur = 0;  // highest usable slot index, <= w
  double scale_factor = 1.0;

  int node_id(const std::string& name) const;  // -1 when absent
  // Link joining u and v regardless of direction; -1 when absent.
  int link_between(int u, int v) const;
};

struct Route {
  int s = -1;
  int d = -1;
  int k = 0;                    // rank within the K-shortest list, 1-based
  std::vector<int> node_seq;    // s ... d
  std::vector<int> link_ids;    // node_seq.size() - 1 entries
  double length_km = 0.0;
  int n_spans = 0;

  bool uses_link(int link_id) const;
};

// A contiguous block of b_slots frequency slots starting at start_slot.
struct Channel {
  int start_slot = 1;  // 1-based
  int b_slots = 0;

  int end_slot() const { return start_slot + b_slots - 1; }
  bool overlaps(const Channel& o) const {
    return start_slot <= o.end_slot() && o.start_slot <= end_slot();
  }
  // Center frequency in GHz measured from the band start (slot 1 left edge).
  double center_ghz(double f_grid_ghz) const {
    return (start_slot - 1 + 0.5 * b_slots) * f_grid_ghz;
  }
};

Network load_topology(const std::string& path);

// Up to K loopless routes between s and d, sorted by length; equal-length
// routes are ordered by their node sequences.
std::vector<Route> k_shortest_paths(const Network& net, int s, int d, int K);

// All placements of a b_slots-wide channel within slots [1, w_cur].
std::vector<Channel> enumerate_channels(int b_slots, int w_cur);

}  // namespace fon::topo
