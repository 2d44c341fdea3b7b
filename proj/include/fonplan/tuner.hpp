#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fonplan/modes.hpp"
#include "fonplan/physical.hpp"
#include "fonplan/spacing.hpp"
#include "fonplan/throughput.hpp"
#include "fonplan/topology.hpp"

// Margin tuning loop.  The first pass reserves each candidate's full
// worst-case interference penalty, which is always safe but wastes SNR.
// Every following pass melts the reserved margins by one step, re-runs
// candidate enumeration, provisioning, and spacing, and verifies the
// deployed placement with the exact interference model.  The loop keeps
// the last placement whose every lightpath still clears its threshold and
// stops at the first violation, when the margins bottom out at zero, or at
// the iteration cap.

namespace fon::tune {

struct TuneConfig {
  double delta_m_db = 0.5;  // margin melt per iteration
  double gap = 0.05;        // MILP gap for the exact engine
  double time_limit_s = 900.0;
  int max_iters = 32;
  enum class Engine { Ilp, Heuristic };
  Engine engine = Engine::Heuristic;
  int k_routes = 10;
  int q_segments = 10;
  int channel_stride = 1;
  thru::LoadOptions load;  // incremental engine settings
};

struct IterRecord {
  int iter = 0;
  double decrement_db = 0.0;   // total margin taken off so far
  double max_margin_db = 0.0;  // largest margin still reserved
  double th_gbps = 0.0;
  int adopted = 0;
  double min_q_db = 0.0;
  bool accepted = false;
  std::map<std::string, int> mode_hist;
};

struct TuneTrace {
  std::vector<IterRecord> iters;
  std::vector<std::string> warnings;
};

struct Solution {
  double th_gbps = 0.0;
  double decrement_db = 0.0;  // melt level of the stored iteration
  double min_q_db = 0.0;
  thru::ProvisioningState state;
  spc::SpacingProblem prob;      // adopted lightpaths with modes and routes
  spc::StrategyOutcome spacing;  // final placements and exact QoT
};

// Runs the loop for the demanded pairs.  Throws when the first iteration
// has a demanded pair with no admissible candidate or cannot place its
// selection under the given spacing strategy.
std::pair<Solution, TuneTrace> tune(const topo::Network& net,
                                    const thru::DemandMatrix& demand,
                                    const modes::Catalog& cat,
                                    const phys::FiberConfig& fib,
                                    const spc::Strategy& strategy,
                                    const TuneConfig& cfg = {});

// One CSV row per iteration.
void write_trace_csv(const TuneTrace& trace, std::ostream& os);

}  // namespace fon::tune
