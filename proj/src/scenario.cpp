#include "fonplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fon::scn {

namespace {

using nlohmann::json;

thru::BaudPolicy loader_policy(BaudPlan plan) {
  switch (plan) {
    case BaudPlan::LowFirst:
      return thru::BaudPolicy::Low;
    case BaudPlan::RandomFirst:
      return thru::BaudPolicy::Random;
    default:
      return thru::BaudPolicy::High;
  }
}

modes::Catalog plan_catalog(const modes::Catalog& cat, BaudPlan plan) {
  switch (plan) {
    case BaudPlan::Single16:
      return modes::restrict_bauds(cat, {16});
    case BaudPlan::Single32:
      return modes::restrict_bauds(cat, {32});
    case BaudPlan::Single64:
      return modes::restrict_bauds(cat, {64});
    default:
      return cat;
  }
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void fill_outcome(RunRecord& rec, const tune::Solution& sol,
                  tune::TuneTrace&& trace, const topo::Network& net) {
  rec.ok = true;
  rec.th_ep = trace.iters.front().th_gbps;
  rec.lightpaths_ep = trace.iters.front().adopted;
  rec.th_jp = sol.th_gbps;
  rec.lightpaths_jp = static_cast<int>(sol.state.adopted.size());
  rec.abs_gain = rec.th_jp - rec.th_ep;
  rec.rel_gain = rec.th_ep > 0.0 ? rec.abs_gain / rec.th_ep : 0.0;
  rec.min_q_db = sol.min_q_db;
  for (const auto& p : sol.prob.paths) ++rec.mode_hist[p.mode_label];

  int n = static_cast<int>(sol.prob.paths.size());
  double mn = 0.0, mx = 0.0, sum = 0.0;
  int counted = 0;
  for (int i = 0; i < n; ++i) {
    double nearest = -1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i || !sol.prob.share[i][j]) continue;
      double d =
          std::fabs(sol.spacing.sol.f_ghz[i] - sol.spacing.sol.f_ghz[j]);
      if (nearest < 0.0 || d < nearest) nearest = d;
    }
    if (nearest < 0.0) continue;
    if (counted == 0 || nearest < mn) mn = nearest;
    if (counted == 0 || nearest > mx) mx = nearest;
    sum += nearest;
    ++counted;
  }
  rec.spacing_min_ghz = counted ? mn : 0.0;
  rec.spacing_max_ghz = counted ? mx : 0.0;
  rec.spacing_avg_ghz = counted ? sum / counted : 0.0;

  rec.slot_usage.assign(net.links.size(), std::vector<char>(net.w, 0));
  for (int i = 0; i < n; ++i) {
    const auto& p = sol.prob.paths[i];
    int start = sol.spacing.sol.start_slot[i];
    for (int l : p.link_ids)
      for (int s = start; s < start + p.b_slots; ++s)
        rec.slot_usage[l][s - 1] = 1;
  }
  rec.trace = std::move(trace);
}

}  // namespace

std::string plan_name(BaudPlan plan) {
  switch (plan) {
    case BaudPlan::Single16:
      return "16";
    case BaudPlan::Single32:
      return "32";
    case BaudPlan::Single64:
      return "64";
    case BaudPlan::LowFirst:
      return "LB";
    case BaudPlan::RandomFirst:
      return "RB";
    case BaudPlan::HighFirst:
      return "HB";
  }
  return "?";
}

BaudPlan plan_from(const std::string& name) {
  if (name == "16") return BaudPlan::Single16;
  if (name == "32") return BaudPlan::Single32;
  if (name == "64") return BaudPlan::Single64;
  if (name == "LB") return BaudPlan::LowFirst;
  if (name == "RB") return BaudPlan::RandomFirst;
  if (name == "HB") return BaudPlan::HighFirst;
  throw std::invalid_argument("unknown transceiver plan: " + name);
}

std::string strategy_label(const spc::Strategy& s) {
  auto set_tag = [&]() {
    std::string t;
    for (double h : s.h_set_ghz) {
      if (!t.empty()) t += "/";
      t += num(h);
    }
    return t;
  };
  switch (s.kind) {
    case spc::Strategy::Kind::Cso:
      return "CSO";
    case spc::Strategy::Kind::Fix:
      return "FIX" + set_tag();
    case spc::Strategy::Kind::CanOpt:
      return "CANopt" + set_tag();
    case spc::Strategy::Kind::CanRandom:
      return "CANrand" + set_tag() + "s" + std::to_string(s.seed);
  }
  return "?";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scenario file: " + path);
  json j = json::parse(is);

  Scenario sc;
  sc.name = j.value("name", std::string("scenario"));
  sc.topology_label = j.at("topology").get<std::string>();
  sc.net = topo::load_topology(sc.topology_label);
  sc.cat = modes::load_mode_table(j.at("modes").get<std::string>(),
                                  sc.net.f_grid_ghz);
  sc.fib = phys::load_fiber(j.at("fiber").get<std::string>());

  if (j.contains("loads")) sc.loads = j["loads"].get<std::vector<double>>();
  for (double l : sc.loads)
    if (!(l > 0.0 && l <= 1.0))
      throw std::invalid_argument("load fractions must lie in (0, 1]");

  if (j.contains("policies")) {
    sc.plans.clear();
    for (const auto& p : j["policies"])
      sc.plans.push_back(plan_from(p.get<std::string>()));
  }

  if (j.contains("strategies")) {
    sc.strategies.clear();
    for (const auto& s : j["strategies"]) {
      std::string kind = s.at("kind").get<std::string>();
      if (kind == "CSO") {
        sc.strategies.push_back(spc::Strategy::cso());
      } else if (kind == "FIX") {
        sc.strategies.push_back(spc::Strategy::fix(s.at("h").get<double>()));
      } else if (kind == "CANopt") {
        sc.strategies.push_back(
            spc::Strategy::can_opt(s.at("set").get<std::vector<double>>()));
      } else if (kind == "CANrand") {
        sc.strategies.push_back(spc::Strategy::can_random(
            s.at("set").get<std::vector<double>>(), s.value("seed", 1u)));
      } else {
        throw std::invalid_argument("unknown spacing strategy: " + kind);
      }
    }
  }

  if (j.contains("psd_uw_per_ghz"))
    sc.psd_uw_ghz = j["psd_uw_per_ghz"].get<std::vector<double>>();
  else
    sc.psd_uw_ghz = {sc.fib.psd_w_hz * 1e15};

  sc.seed = j.value("seed", 1u);

  if (j.contains("demand")) {
    for (const auto& e : j["demand"]) {
      int s = sc.net.node_id(e.at("s").get<std::string>());
      int d = sc.net.node_id(e.at("d").get<std::string>());
      if (s < 0 || d < 0)
        throw std::invalid_argument("demand references an unknown node");
      sc.demand.entries.push_back({s, d, e.at("frac").get<double>()});
    }
  }

  std::string engine = j.value("engine", std::string("heuristic"));
  if (engine == "ilp")
    sc.tune.engine = tune::TuneConfig::Engine::Ilp;
  else if (engine == "heuristic")
    sc.tune.engine = tune::TuneConfig::Engine::Heuristic;
  else
    throw std::invalid_argument("unknown engine: " + engine);
  sc.tune.k_routes = j.value("k_routes", sc.tune.k_routes);
  sc.tune.delta_m_db = j.value("delta_m_db", sc.tune.delta_m_db);
  sc.tune.gap = j.value("gap", sc.tune.gap);
  sc.tune.max_iters = j.value("max_iters", sc.tune.max_iters);
  sc.tune.q_segments = j.value("q_segments", sc.tune.q_segments);
  sc.tune.channel_stride = j.value("channel_stride", sc.tune.channel_stride);
  sc.tune.time_limit_s = j.value("time_limit_s", sc.tune.time_limit_s);
  sc.tune.load.step_gbps = j.value("step_gbps", sc.tune.load.step_gbps);
  return sc;
}

Bundle run_scenario(const Scenario& sc) {
  Bundle b;
  b.scenario_name = sc.name;
  b.topology = sc.topology_label;
  b.seed = sc.seed;

  for (double load : sc.loads) {
    topo::Network net = sc.net;
    net.w_cur = std::clamp<int>(
        static_cast<int>(std::lround(load * net.w)), 1, net.w);
    thru::DemandMatrix demand =
        sc.demand.entries.empty() ? thru::uniform_demand(net) : sc.demand;
    for (BaudPlan plan : sc.plans) {
      modes::Catalog cat = plan_catalog(sc.cat, plan);
      tune::TuneConfig cfg = sc.tune;
      cfg.load.policy = loader_policy(plan);
      cfg.load.seed = sc.seed;
      for (const auto& strat : sc.strategies) {
        for (double psd : sc.psd_uw_ghz) {
          phys::FiberConfig fib = sc.fib;
          fib.psd_w_hz = phys::uw_per_ghz(psd);
          RunRecord rec;
          rec.load = load;
          rec.plan = plan_name(plan);
          rec.strategy = strategy_label(strat);
          rec.psd_uw = psd;
          try {
            auto [sol, trace] = tune::tune(net, demand, cat, fib, strat, cfg);
            fill_outcome(rec, sol, std::move(trace), net);
          } catch (const std::exception& e) {
            rec.error = e.what();
            b.partial = true;
          }
          b.runs.push_back(std::move(rec));
        }
      }
    }
  }
  return b;
}

void report(const Bundle& b, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::path dir(out_dir);

  auto key = [](std::ostream& os, const RunRecord& r) -> std::ostream& {
    os << r.load << "," << r.plan << "," << r.strategy << "," << r.psd_uw;
    return os;
  };

  {
    auto os = open_out(dir / "throughput_vs_load.csv");
    os << "load,plan,strategy,psd_uw_ghz,th_ep_gbps,th_jp_gbps,"
          "abs_gain_gbps,rel_gain\n";
    for (const auto& r : b.runs) {
      if (!r.ok) continue;
      key(os, r) << "," << r.th_ep << "," << r.th_jp << "," << r.abs_gain
                 << "," << r.rel_gain << "\n";
    }
  }
  {
    auto os = open_out(dir / "mode_hist.csv");
    os << "load,plan,strategy,psd_uw_ghz,mode,count\n";
    for (const auto& r : b.runs) {
      if (!r.ok) continue;
      for (const auto& [mode, count] : r.mode_hist)
        key(os, r) << "," << mode << "," << count << "\n";
    }
  }
  {
    auto os = open_out(dir / "min_q.csv");
    os << "load,plan,strategy,psd_uw_ghz,iter,decrement_db,th_gbps,"
          "min_q_db,accepted\n";
    for (const auto& r : b.runs) {
      if (!r.ok) continue;
      for (const auto& it : r.trace.iters)
        key(os, r) << "," << it.iter << "," << it.decrement_db << ","
                   << it.th_gbps << "," << it.min_q_db << ","
                   << (it.accepted ? 1 : 0) << "\n";
    }
  }
  {
    auto os = open_out(dir / "spacing_stats.csv");
    os << "load,plan,strategy,psd_uw_ghz,min_ghz,avg_ghz,max_ghz\n";
    for (const auto& r : b.runs) {
      if (!r.ok) continue;
      key(os, r) << "," << r.spacing_min_ghz << "," << r.spacing_avg_ghz
                 << "," << r.spacing_max_ghz << "\n";
    }
  }
  {
    auto os = open_out(dir / "slot_usage.csv");
    os << "load,plan,strategy,psd_uw_ghz,link,slot,used\n";
    for (const auto& r : b.runs) {
      if (!r.ok) continue;
      for (size_t l = 0; l < r.slot_usage.size(); ++l)
        for (size_t s = 0; s < r.slot_usage[l].size(); ++s)
          key(os, r) << "," << l << "," << (s + 1) << ","
                     << int(r.slot_usage[l][s]) << "\n";
    }
  }
  {
    auto os = open_out(dir / "cost_perf.csv");
    os << "load,plan,strategy,psd_uw_ghz,lightpaths_ep,lightpaths_jp,"
          "th_ep_gbps,th_jp_gbps\n";
    for (const auto& r : b.runs) {
      if (!r.ok) continue;
      key(os, r) << "," << r.lightpaths_ep << "," << r.lightpaths_jp << ","
                 << r.th_ep << "," << r.th_jp << "\n";
    }
  }
  {
    auto os = open_out(dir / "summary.txt");
    int ok = 0;
    for (const auto& r : b.runs) ok += r.ok ? 1 : 0;
    os << "scenario " << b.scenario_name << " on " << b.topology << " (seed "
       << b.seed << ")\n";
    os << "runs: " << ok << " ok, " << (b.runs.size() - ok) << " failed"
       << (b.partial ? " [partial]" : "") << "\n\n";
    for (const auto& r : b.runs) {
      os << "load=" << r.load << " plan=" << r.plan
         << " strategy=" << r.strategy << " psd=" << r.psd_uw << ": ";
      if (!r.ok) {
        os << "FAILED: " << r.error << "\n";
        continue;
      }
      os << "EP=" << r.th_ep << " Gbps, JP=" << r.th_jp << " Gbps, gain="
         << r.abs_gain << " Gbps, rel_gain=" << r.rel_gain << ", lightpaths "
         << r.lightpaths_ep << "->" << r.lightpaths_jp << ", min Q "
         << r.min_q_db << " dB\n";
    }
    os << "\nrelative gain by load:\n";
    std::vector<std::string> combos;
    for (const auto& r : b.runs) {
      if (!r.ok) continue;
      std::string c = "plan=" + r.plan + " strategy=" + r.strategy +
                      " psd=" + num(r.psd_uw);
      if (std::find(combos.begin(), combos.end(), c) == combos.end())
        combos.push_back(c);
    }
    for (const auto& c : combos) {
      os << c << ":";
      for (const auto& r : b.runs) {
        if (!r.ok) continue;
        if ("plan=" + r.plan + " strategy=" + r.strategy +
                " psd=" + num(r.psd_uw) !=
            c)
          continue;
        os << " " << num(r.load) << ":" << num(r.rel_gain);
      }
      os << "\n";
    }
  }
}

}  // namespace fon::scn
