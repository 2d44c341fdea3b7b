#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fonplan/modes.hpp"
#include "fonplan/physical.hpp"
#include "fonplan/topology.hpp"

// Candidate lightpath enumeration.  For every demand pair, route, channel
// position, baud-rate, and transmission mode, a candidate is kept when the
// interference-free SNR minus the reserved margin still clears the mode's
// threshold.  Margins start at each class's worst-case interference penalty
// and melt uniformly as the tuner lowers them.

namespace fon::pre {

struct Pair {
  int s = 0;
  int d = 0;
};

struct Candidate {
  int id = 0;
  int route_idx = 0;  // into Precalc::routes
  topo::Channel ch;
  int mode_idx = 0;  // into the catalog's modes
  int gbaud = 0;
  double capacity_gbps = 0.0;
  double snr_best_db = 0.0;
  double x_worst_db = 0.0;
};

struct Precalc {
  std::vector<topo::Route> routes;      // every enumerated (s,d,k)
  std::vector<Candidate> candidates;    // ascending id
  std::vector<std::string> warnings;    // pairs left without any candidate
  double max_x_worst_db = 0.0;          // over all enumerated classes
  long long enumerated = 0;             // tuples considered before filtering
};

// margin_decrement_db is how much the tuner has already taken off the
// worst-case margins: each class reserves max(0, x_worst - decrement).
// Channels start on slots 1, 1+stride, ... within W_cur; the worst-case
// fill is evaluated over the full band W.
Precalc precalculate(const topo::Network& net, const std::vector<Pair>& pairs,
                     int k_routes, const modes::Catalog& cat,
                     const phys::FiberConfig& fib, double margin_decrement_db,
                     int channel_stride = 1);

// Debug dump, one CSV row per candidate.
void dump_candidates(const Precalc& pre, const topo::Network& net,
                     const modes::Catalog& cat, std::ostream& os);

}  // namespace fon::pre
