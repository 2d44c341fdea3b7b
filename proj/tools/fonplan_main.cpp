#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fonplan/modes.hpp"
#include "fonplan/physical.hpp"
#include "fonplan/precalc.hpp"
#include "fonplan/scenario.hpp"
#include "fonplan/spacing.hpp"
#include "fonplan/topology.hpp"
#include "fonplan/tuner.hpp"

namespace {

struct CommonInputs {
  std::string topology, modes, fiber;
  double psd_uw = -1.0;  // negative keeps the fiber file's value
  int w_cur = 0;         // 0 keeps the topology file's value
  std::vector<int> bauds;
};

void add_common(CLI::App* cmd, CommonInputs& in) {
  cmd->add_option("--topology", in.topology, "Topology JSON file")
      ->required();
  cmd->add_option("--modes", in.modes, "Mode table JSON file")->required();
  cmd->add_option("--fiber", in.fiber, "Fiber profile JSON file")->required();
  cmd->add_option("--psd", in.psd_uw, "Launch PSD in uW/GHz");
  cmd->add_option("--w-cur", in.w_cur, "Usable slots per link");
  cmd->add_option("--bauds", in.bauds, "Restrict to these baud-rates");
}

fon::spc::Strategy make_strategy(const std::string& kind,
                                 const std::vector<double>& h,
                                 unsigned seed) {
  if (kind == "CSO") return fon::spc::Strategy::cso();
  if (kind == "FIX") {
    if (h.size() != 1)
      throw CLI::ValidationError("--spacings", "FIX takes exactly one spacing");
    return fon::spc::Strategy::fix(h.front());
  }
  if (h.empty())
    throw CLI::ValidationError("--spacings", kind + " needs candidate spacings");
  if (kind == "CANopt") return fon::spc::Strategy::can_opt(h);
  if (kind == "CANrand") return fon::spc::Strategy::can_random(h, seed);
  throw CLI::ValidationError("--strategy", "unknown strategy " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Flexible-grid optical network planning: candidate enumeration, "
      "margin tuning with channel-spacing optimization, experiment sweeps"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out";
  auto* run = app.add_subcommand(
      "run", "Run a scenario sweep and write plot-ready reports");
  run->add_option("-s,--scenario", scenario_path, "Scenario JSON file")
      ->required();
  run->add_option("-o,--out", out_dir, "Output directory");

  CommonInputs pin;
  double decrement = 0.0;
  int k_routes = 10, stride = 1;
  std::string pre_out;
  auto* pre = app.add_subcommand(
      "precalc", "Enumerate admissible lightpath candidates to CSV");
  add_common(pre, pin);
  pre->add_option("--decrement", decrement,
                  "Margin already melted away, dB");
  pre->add_option("-k,--k-routes", k_routes, "Routes per node pair");
  pre->add_option("--stride", stride, "Channel start-slot stride");
  pre->add_option("-o,--out", pre_out, "Output CSV (default stdout)");

  CommonInputs tin;
  std::string policy = "HB", strategy = "CSO", tune_out = "out";
  std::vector<double> h_set;
  unsigned seed = 1, strategy_seed = 1;
  std::string engine = "heuristic";
  double delta_m = 0.5, gap = 0.05, step = 25.0;
  int max_iters = 32, tune_k = 10;
  auto* tn = app.add_subcommand(
      "tune", "Run the margin-tuning loop for one configuration");
  add_common(tn, tin);
  tn->add_option("--policy", policy, "Transceiver plan: 16|32|64|LB|RB|HB");
  tn->add_option("--strategy", strategy,
                 "Spacing strategy: CSO|FIX|CANopt|CANrand");
  tn->add_option("--spacings", h_set, "Candidate spacings in GHz (FIX/CAN)");
  tn->add_option("--strategy-seed", strategy_seed,
                 "Spacing draw seed (CANrand)");
  tn->add_option("--seed", seed, "Loader seed");
  tn->add_option("--engine", engine, "Provisioning engine: heuristic|ilp");
  tn->add_option("--delta-m", delta_m, "Margin melt per iteration, dB");
  tn->add_option("--gap", gap, "MILP gap for the exact engine");
  tn->add_option("--step", step, "Loader throughput step, Gbps");
  tn->add_option("--max-iters", max_iters, "Iteration cap");
  tn->add_option("-k,--k-routes", tune_k, "Routes per node pair");
  tn->add_option("-o,--out", tune_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto sc = fon::scn::load_scenario(scenario_path);
      auto bundle = fon::scn::run_scenario(sc);
      fon::scn::report(bundle, out_dir);
      std::cout << "wrote reports for " << bundle.runs.size() << " runs to "
                << out_dir << "\n";
      return bundle.partial ? 2 : 0;
    }

    if (pre->parsed()) {
      auto net = fon::topo::load_topology(pin.topology);
      auto cat = fon::modes::load_mode_table(pin.modes, net.f_grid_ghz);
      auto fib = fon::phys::load_fiber(pin.fiber);
      if (pin.psd_uw >= 0.0) fib.psd_w_hz = fon::phys::uw_per_ghz(pin.psd_uw);
      if (pin.w_cur > 0) net.w_cur = pin.w_cur;
      if (!pin.bauds.empty()) cat = fon::modes::restrict_bauds(cat, pin.bauds);
      std::vector<fon::pre::Pair> pairs;
      int n = static_cast<int>(net.nodes.size());
      for (int s = 0; s < n; ++s)
        for (int d = 0; d < n; ++d)
          if (s != d) pairs.push_back({s, d});
      auto result = fon::pre::precalculate(net, pairs, k_routes, cat, fib,
                                           decrement, stride);
      if (pre_out.empty()) {
        fon::pre::dump_candidates(result, net, cat, std::cout);
      } else {
        std::ofstream os(pre_out);
        if (!os) throw std::runtime_error("cannot write " + pre_out);
        fon::pre::dump_candidates(result, net, cat, os);
        std::cout << result.candidates.size() << " candidates -> " << pre_out
                  << "\n";
      }
      for (const auto& w : result.warnings) std::cerr << "warning: " << w
                                                      << "\n";
      return 0;
    }

    // Single tuning run expressed as a one-combination sweep.
    fon::scn::Scenario sc;
    sc.name = "tune";
    sc.topology_label = tin.topology;
    sc.net = fon::topo::load_topology(tin.topology);
    sc.cat = fon::modes::load_mode_table(tin.modes, sc.net.f_grid_ghz);
    sc.fib = fon::phys::load_fiber(tin.fiber);
    if (tin.psd_uw >= 0.0) sc.psd_uw_ghz = {tin.psd_uw};
    else sc.psd_uw_ghz = {sc.fib.psd_w_hz * 1e15};
    if (!tin.bauds.empty())
      sc.cat = fon::modes::restrict_bauds(sc.cat, tin.bauds);
    sc.loads = {tin.w_cur > 0
                    ? static_cast<double>(tin.w_cur) / sc.net.w
                    : static_cast<double>(sc.net.w_cur) / sc.net.w};
    sc.plans = {fon::scn::plan_from(policy)};
    sc.strategies = {make_strategy(strategy, h_set, strategy_seed)};
    sc.seed = seed;
    sc.tune.engine = engine == "ilp" ? fon::tune::TuneConfig::Engine::Ilp
                                     : fon::tune::TuneConfig::Engine::Heuristic;
    sc.tune.delta_m_db = delta_m;
    sc.tune.gap = gap;
    sc.tune.max_iters = max_iters;
    sc.tune.k_routes = tune_k;
    sc.tune.load.step_gbps = step;
    auto bundle = fon::scn::run_scenario(sc);
    fon::scn::report(bundle, tune_out);
    for (const auto& r : bundle.runs) {
      if (!r.ok) throw std::runtime_error(r.error);
      std::cout << "EP " << r.th_ep << " Gbps -> JP " << r.th_jp
                << " Gbps (rel_gain " << r.rel_gain << "), min Q "
                << r.min_q_db << " dB, reports in " << tune_out << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
