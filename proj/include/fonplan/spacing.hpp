#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fonplan/modes.hpp"
#include "fonplan/optim.hpp"
#include "fonplan/precalc.hpp"
#include "fonplan/throughput.hpp"

// Channel-spacing optimization.  Adopted lightpaths keep their relative
// spectral order but their center frequencies slide continuously over the
// whole band; a min-max LP pushes down the worst weighted interference
// load.  Interference enters through piecewise-linear envelopes of the
// cross-channel efficiency, restricted to each channel's nearest and
// second-nearest neighbors to keep the model linear in size.  Strategy
// variants pin the spacing (FIX), confine it to a candidate interval
// (CAN), or leave it free (CSO).  Final frequencies are snapped back to
// the slot grid and judged by an exact interference evaluation.

namespace fon::spc {

struct SpacedLightpath {
  int cand_id = -1;
  std::vector<int> link_ids;
  int n_spans = 0;  // along the whole route
  int start_slot = 1;
  int b_slots = 0;
  int gbaud = 0;
  double thr_db = 0.0;
  double snr_best_db = 0.0;
  double capacity_gbps = 0.0;
  std::string mode_label;
};

struct SpacingProblem {
  std::vector<SpacedLightpath> paths;
  std::vector<std::vector<char>> share;        // common-link indicator
  std::vector<std::vector<int>> shared_spans;  // spans on common links
  std::vector<std::vector<char>> y1;  // nearest sharer per side
  std::vector<std::vector<char>> y2;  // neighbor-of-neighbor sharers
  // Interference envelope per (victim slots, interferer slots).
  std::map<std::pair<int, int>, phys::XciFit> fits;
  int w = 0;  // band width in slots; spacing may use all of it
  double f_grid_ghz = 12.5;
  int n_bandwidths = 1;  // distinct transceiver footprints
  phys::FiberConfig fib;
  double g_ase_span = 0.0;  // one-span amplifier noise PSD

  bool neighbor(int i, int j) const { return y1[i][j] || y2[i][j]; }
  // Frozen spectral order: lower start slot first (sharers never tie).
  bool before(int i, int j) const;
  double center_ghz(int i) const;  // of the incoming slot placement
  // Mode threshold over interference-free SNR, linear units.
  double weight(int i) const;
  const phys::XciFit& fit_for(int b_victim, int b_interferer) const;
};

// Assembles the spacing problem for an adopted selection: link incidence,
// shared spans, neighbor indicators, and one interference envelope per
// bandwidth pair over the full band.
SpacingProblem make_problem(const pre::Precalc& pre, const topo::Network& net,
                            const thru::ProvisioningState& state,
                            const modes::Catalog& cat,
                            const phys::FiberConfig& fib, int q_segments = 10);

// Fills y1/y2 from the current slot placement: per side, the sharer with
// the closest start slot; then sharers reached through one such hop.  At
// most four neighbors are kept per lightpath (closest first on overflow).
void compute_neighbors(SpacingProblem& prob);

struct Strategy {
  enum class Kind { Cso, Fix, CanOpt, CanRandom };
  Kind kind = Kind::Cso;
  std::vector<double> h_set_ghz;  // candidate spacings; FIX uses one value
  unsigned seed = 1;              // CanRandom draw

  static Strategy cso() { return {}; }
  static Strategy fix(double h_ghz) {
    return {Kind::Fix, {h_ghz}, 1};
  }
  static Strategy can_opt(std::vector<double> h_set) {
    return {Kind::CanOpt, std::move(h_set), 1};
  }
  static Strategy can_random(std::vector<double> h_set, unsigned seed) {
    return {Kind::CanRandom, std::move(h_set), seed};
  }
};

struct Phase4Model {
  optim::LinearModel model;
  int x_net_var = -1;
  std::vector<int> f_vars;   // one per lightpath, GHz
  bool nearest_only = true;  // neighbor reduction in effect
};

// Min-max LP over center frequencies: per-link interference loads bounded
// by envelope pieces, threshold-weighted per-lightpath sums bounded by the
// network objective, non-overlap between spectrally adjacent sharers, and
// band limits as variable bounds.  Strategy constraints are appended; FIX
// and CAN(random) run as pure feasibility problems.  With nearest_only
// false the envelopes cover every sharing pair instead of the reduction.
Phase4Model build_phase4_model(const SpacingProblem& prob,
                               const Strategy& strat, bool nearest_only = true);
void apply_strategy(Phase4Model& pm, const SpacingProblem& prob,
                    const Strategy& strat);

struct SpacingSolution {
  std::vector<double> f_ghz;    // grid-aligned centers
  std::vector<int> start_slot;  // equivalent slot placement
  double x_network_db = 0.0;    // reduction-evaluated objective, dB
  std::vector<double> q_db;     // exact per-lightpath QoT metric
};

// Snaps a continuous solution to the slot grid: nearest aligned position,
// then minimal same-order shifts to clear overlaps and band bounds.
SpacingSolution round_to_grid(const SpacingProblem& prob,
                              const std::vector<double>& f_cont);

// Exact QoT metric per lightpath: route SNR against every sharer at the
// given centers (no neighbor reduction, no envelope), minus the mode
// threshold.
std::vector<double> evaluate_qot(const SpacingProblem& prob,
                                 const std::vector<double>& f_ghz);

// Objective value the LP would assign to fixed centers: envelopes at their
// fitted values, neighbor reduction optional.  Linear units.
double reduced_network_x(const SpacingProblem& prob,
                         const std::vector<double>& f_ghz,
                         bool nearest_only = true);

struct StrategyOutcome {
  bool feasible = false;
  std::vector<double> f_cont;  // continuous LP optimum
  double x_net_lp = 0.0;       // LP objective, linear units
  SpacingSolution sol;         // rounded and fully evaluated
};

// Build, solve, round, evaluate.  Infeasible strategies (FIX packing wider
// than the band) return feasible=false with the rest empty.
StrategyOutcome run_strategy(const SpacingProblem& prob, const Strategy& strat);

// One CSV row per lightpath: center, slots, nearest-sharer spacing, QoT.
void write_spacing_csv(const SpacingProblem& prob, const SpacingSolution& sol,
                       std::ostream& os);

}  // namespace fon::spc
