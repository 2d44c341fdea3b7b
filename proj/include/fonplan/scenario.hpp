#pragma once

#include <map>
#include <string>
#include <vector>

#include "fonplan/modes.hpp"
#include "fonplan/physical.hpp"
#include "fonplan/spacing.hpp"
#include "fonplan/throughput.hpp"
#include "fonplan/topology.hpp"
#include "fonplan/tuner.hpp"

// Experiment sweeps.  A scenario crosses traffic loads (lit share of the
// band), transceiver plans, spacing strategies, and launch power densities;
// every combination runs the full margin-tuning loop.  The bundle keeps the
// first-iteration baseline next to the tuned result so gains can be read
// off directly, and the report writer turns one bundle into a fixed set of
// plot-ready CSV files plus a human summary.

namespace fon::scn {

// Which transceivers a run may use and in what order the incremental
// loader prefers them.
enum class BaudPlan {
  Single16,
  Single32,
  Single64,
  LowFirst,
  RandomFirst,
  HighFirst,
};

std::string plan_name(BaudPlan plan);              // "16" ... "HB"
BaudPlan plan_from(const std::string& name);       // throws on unknown names
std::string strategy_label(const spc::Strategy& s);

struct Scenario {
  std::string name = "scenario";
  std::string topology_label;
  topo::Network net;
  modes::Catalog cat;
  phys::FiberConfig fib;
  std::vector<double> loads{1.0};  // lit share of the band per run
  std::vector<BaudPlan> plans{BaudPlan::HighFirst};
  std::vector<spc::Strategy> strategies{spc::Strategy::cso()};
  std::vector<double> psd_uw_ghz{25.0};
  thru::DemandMatrix demand;  // empty entries mean uniform all-to-all
  unsigned seed = 1;
  tune::TuneConfig tune;
};

// Reads a scenario file (JSON) and materializes the referenced topology,
// mode table, and fiber profile.
Scenario load_scenario(const std::string& path);

struct RunRecord {
  double load = 1.0;
  std::string plan;
  std::string strategy;
  double psd_uw = 0.0;
  bool ok = false;
  std::string error;
  double th_ep = 0.0;  // first-iteration (full-margin) throughput
  double th_jp = 0.0;  // tuned throughput
  double abs_gain = 0.0;
  double rel_gain = 0.0;
  int lightpaths_ep = 0;
  int lightpaths_jp = 0;
  double min_q_db = 0.0;
  std::map<std::string, int> mode_hist;  // tuned selection
  double spacing_min_ghz = 0.0;  // nearest-sharer distances, tuned
  double spacing_avg_ghz = 0.0;
  double spacing_max_ghz = 0.0;
  std::vector<std::vector<char>> slot_usage;  // [link][slot], tuned
  tune::TuneTrace trace;
};

struct Bundle {
  std::string scenario_name;
  std::string topology;
  unsigned seed = 1;
  bool partial = false;  // at least one combination failed
  std::vector<RunRecord> runs;
};

// Runs every (load, plan, strategy, psd) combination.  Failures are caught
// per combination and recorded, never aborting the sweep.
Bundle run_scenario(const Scenario& sc);

// Writes throughput_vs_load.csv, mode_hist.csv, min_q.csv,
// spacing_stats.csv, slot_usage.csv, cost_perf.csv, and summary.txt into
// out_dir (created if needed).  Deterministic: the same bundle produces
// byte-identical files.
void report(const Bundle& b, const std::string& out_dir);

}  // namespace fon::scn
