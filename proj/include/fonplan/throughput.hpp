#pragma once

#include <vector>

#include "fonplan/optim.hpp"
#include "fonplan/precalc.hpp"

// Network-wide provisioning.  Every demand pair owes a fixed fraction of a
// common throughput scale; provisioning picks candidate lightpaths so that
// each pair's adopted capacity covers its share while no frequency slot on
// any link is claimed twice.  The exact path is a MILP that maximizes the
// scale and can then thin the selection down to the fewest lightpaths that
// keep it; the incremental loader grows the scale in fixed steps and prefers
// upgrading modes in place before it spends new spectrum.

namespace fon::thru {

struct Demand {
  int s = 0;
  int d = 0;
  double frac = 0.0;  // this pair's share of the network throughput
};

struct DemandMatrix {
  std::vector<Demand> entries;

  void validate(const topo::Network& net) const;
  double frac(int s, int d) const;  // 0 when the pair is absent
};

// Equal share for every ordered node pair.
DemandMatrix uniform_demand(const topo::Network& net);

struct ProvisioningState {
  std::vector<int> adopted;  // candidate ids, in adoption order
  double th_gbps = 0.0;

  double pair_capacity_gbps(const pre::Precalc& pre, int s, int d) const;
  // Checks selection sanity: ids valid and distinct, channels inside the
  // usable band, no slot on any link carrying two lightpaths, no pair
  // holding the same route and channel twice, and th_gbps covered by every
  // demanded pair's adopted capacity.
  void validate(const pre::Precalc& pre, const topo::Network& net,
                const DemandMatrix& demand) const;
};

struct Phase2Model {
  optim::LinearModel model;
  int th_var = -1;
  // Parallel arrays: binary column and the candidate id it selects.
  std::vector<int> delta_vars;
  std::vector<int> delta_cand_ids;
};

// Maximize TH subject to: delivered(s,d) = TH * frac(s,d), delivered does
// not exceed the pair's adopted capacity, and each (link, slot) carries at
// most one adopted lightpath.  Candidates spectrally identical to a
// higher-capacity sibling (same route, start slot, and baud-rate) can never
// help either objective and are dropped up front.
Phase2Model build_phase2_model(const pre::Precalc& pre,
                               const topo::Network& net,
                               const DemandMatrix& demand);

struct PlanResult {
  ProvisioningState state;
  optim::SolveResult solve;
};

// Solves the selection MILP for the largest supportable throughput scale.
PlanResult maximize_throughput(const pre::Precalc& pre,
                               const topo::Network& net,
                               const DemandMatrix& demand,
                               const optim::SolveOptions& opt = {});

// Minimizes the number of adopted lightpaths while keeping the throughput
// scale at or above th_target, which must be attainable (normally the value
// just returned by maximize_throughput).
PlanResult remove_redundant(const pre::Precalc& pre, const topo::Network& net,
                            const DemandMatrix& demand, double th_target,
                            const optim::SolveOptions& opt = {});

// Transceiver preference when the loader sets up or re-forms a lightpath.
enum class BaudPolicy { High, Low, Random };

struct LoadOptions {
  double step_gbps = 25.0;  // throughput scale increment per round
  BaudPolicy policy = BaudPolicy::High;
  unsigned seed = 1;        // used by BaudPolicy::Random only
  long long max_rounds = 1'000'000;
};

// Incremental loader.  Each round raises the target scale by one step and
// visits the demand pairs in lexicographic order.  A short pair first
// upgrades its existing lightpaths in place (same route, channel, and
// baud-rate, next higher capacity), which costs no extra spectrum.  If that
// is not enough, it applies the single cheapest sufficient action: either
// re-forming one of its lightpaths (new route, channel, or baud-rate, at a
// capacity gain) or setting up a new one.  When no action can close a
// pair's gap the algorithm stops and returns the last fully supported
// scale, keeping everything already applied.
ProvisioningState sequential_loading(const pre::Precalc& pre,
                                     const topo::Network& net,
                                     const DemandMatrix& demand,
                                     const LoadOptions& opt = {});

}  // namespace fon::thru
