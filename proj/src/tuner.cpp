#include "fonplan/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fonplan/precalc.hpp"

namespace fon::tune {

namespace {

std::vector<pre::Pair> demanded_pairs(const thru::DemandMatrix& demand) {
  std::vector<pre::Pair> pairs;
  for (const auto& e : demand.entries)
    if (e.frac > 0.0) pairs.push_back({e.s, e.d});
  return pairs;
}

// Every demanded pair must own at least one candidate, or the first
// iteration cannot provision anything for it.
void check_coverage(const pre::Precalc& pre,
                    const std::vector<pre::Pair>& pairs) {
  std::set<std::pair<int, int>> covered;
  for (const auto& c : pre.candidates) {
    const auto& r = pre.routes[c.route_idx];
    covered.insert({r.s, r.d});
  }
  for (const auto& p : pairs) {
    if (covered.count({p.s, p.d})) continue;
    std::ostringstream os;
    os << "no admissible lightpath for demanded pair " << p.s << "->" << p.d
       << " at full worst-case margins";
    for (const auto& w : pre.warnings) os << "; " << w;
    throw std::runtime_error(os.str());
  }
}

thru::ProvisioningState run_phases23(const pre::Precalc& pre,
                                     const topo::Network& net,
                                     const thru::DemandMatrix& demand,
                                     const TuneConfig& cfg) {
  if (cfg.engine == TuneConfig::Engine::Heuristic)
    return thru::sequential_loading(pre, net, demand, cfg.load);
  optim::SolveOptions opt;
  opt.gap = cfg.gap;
  opt.time_limit_s = cfg.time_limit_s;
  auto grown = thru::maximize_throughput(pre, net, demand, opt);
  if (!grown.solve.feasible())
    throw std::runtime_error("throughput selection failed: " +
                             optim::status_name(grown.solve.status));
  auto thin = thru::remove_redundant(pre, net, demand,
                                     grown.state.th_gbps, opt);
  return thin.solve.feasible() ? thin.state : grown.state;
}

}  // namespace

std::pair<Solution, TuneTrace> tune(const topo::Network& net,
                                    const thru::DemandMatrix& demand,
                                    const modes::Catalog& cat,
                                    const phys::FiberConfig& fib,
                                    const spc::Strategy& strategy,
                                    const TuneConfig& cfg) {
  if (cfg.delta_m_db <= 0.0)
    throw std::invalid_argument("margin step must be positive");
  demand.validate(net);
  auto pairs = demanded_pairs(demand);
  if (pairs.empty()) throw std::invalid_argument("no demanded pairs");

  Solution stored;
  bool have = false;
  TuneTrace trace;

  for (int k = 0; k < cfg.max_iters; ++k) {
    double dec = k * cfg.delta_m_db;
    auto pre = pre::precalculate(net, pairs, cfg.k_routes, cat, fib, dec,
                                 cfg.channel_stride);
    if (k == 0) check_coverage(pre, pairs);

    auto state = run_phases23(pre, net, demand, cfg);
    auto prob = spc::make_problem(pre, net, state, cat, fib, cfg.q_segments);
    auto out = spc::run_strategy(prob, strategy);

    IterRecord rec;
    rec.iter = k;
    rec.decrement_db = dec;
    rec.max_margin_db = std::max(0.0, pre.max_x_worst_db - dec);
    rec.th_gbps = state.th_gbps;
    rec.adopted = static_cast<int>(state.adopted.size());
    for (const auto& p : prob.paths) ++rec.mode_hist[p.mode_label];

    if (!out.feasible) {
      rec.min_q_db = -std::numeric_limits<double>::infinity();
      trace.iters.push_back(std::move(rec));
      if (k == 0)
        throw std::runtime_error(
            "spacing infeasible for the first iteration's selection");
      break;
    }

    double min_q = std::numeric_limits<double>::infinity();
    for (double q : out.sol.q_db) min_q = std::min(min_q, q);
    rec.min_q_db = min_q;
    rec.accepted = min_q >= 0.0;
    bool accepted = rec.accepted;
    trace.iters.push_back(std::move(rec));
    if (!accepted) break;

    stored.th_gbps = state.th_gbps;
    stored.decrement_db = dec;
    stored.min_q_db = min_q;
    stored.state = std::move(state);
    stored.prob = std::move(prob);
    stored.spacing = std::move(out);
    have = true;

    // Margins have bottomed out; further iterations cannot change anything.
    if (dec >= pre.max_x_worst_db) break;
  }

  if (!have)
    throw std::runtime_error("no iteration produced a placement with every "
                             "lightpath clearing its threshold");

  for (size_t i = 1; i < trace.iters.size(); ++i) {
    const auto& a = trace.iters[i - 1];
    const auto& b = trace.iters[i];
    if (!b.accepted || b.th_gbps >= a.th_gbps - 1e-6) continue;
    std::ostringstream os;
    os << "throughput dipped from " << a.th_gbps << " to " << b.th_gbps
       << " at iteration " << b.iter;
    if (cfg.engine == TuneConfig::Engine::Ilp && cfg.gap <= 0.0)
      throw std::logic_error(os.str() +
                             " despite exact solves; selection bug");
    os << (cfg.engine == TuneConfig::Engine::Ilp
               ? " (within the configured solver gap)"
               : " (incremental engine)");
    trace.warnings.push_back(os.str());
  }

  return {std::move(stored), std::move(trace)};
}

void write_trace_csv(const TuneTrace& trace, std::ostream& os) {
  os << "iter,decrement_db,max_margin_db,th_gbps,adopted,min_q_db,accepted,"
        "modes\n";
  for (const auto& it : trace.iters) {
    os << it.iter << "," << it.decrement_db << "," << it.max_margin_db << ","
       << it.th_gbps << "," << it.adopted << "," << it.min_q_db << ","
       << (it.accepted ? 1 : 0) << ",";
    bool first = true;
    for (const auto& [label, count] : it.mode_hist) {
      if (!first) os << ";";
      os << label << ":" << count;
      first = false;
    }
    os << "\n";
  }
}

}  // namespace fon::tune
