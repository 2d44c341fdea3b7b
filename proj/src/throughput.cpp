#include "fonplan/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace fon::thru {

namespace {

constexpr double kEps = 1e-6;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string pair_tag(int s, int d) {
  return std::to_string(s) + "_" + std::to_string(d);
}

// Lightpaths sharing route, start slot, and baud-rate occupy exactly the
// same spectrum and differ only in mode, so one key covers the whole family.
using ClassKey = std::tuple<int, int, int>;  // route_idx, start_slot, gbaud

ClassKey class_of(const pre::Candidate& c) {
  return {c.route_idx, c.ch.start_slot, c.gbaud};
}

struct PairCands {
  int s = 0;
  int d = 0;
  double frac = 0.0;
  std::vector<int> cand_ids;  // ascending id
};

// Demanded pairs in lexicographic order, each with its candidate ids.
std::vector<PairCands> demanded_pairs(const pre::Precalc& pre,
                                      const DemandMatrix& demand) {
  std::vector<PairCands> out;
  for (const auto& e : demand.entries) {
    if (e.frac > 0.0) out.push_back({e.s, e.d, e.frac, {}});
  }
  std::sort(out.begin(), out.end(), [](const PairCands& a, const PairCands& b) {
    return std::tie(a.s, a.d) < std::tie(b.s, b.d);
  });
  for (const auto& c : pre.candidates) {
    const auto& r = pre.routes[c.route_idx];
    for (auto& p : out) {
      if (p.s == r.s && p.d == r.d) {
        p.cand_ids.push_back(c.id);
        break;
      }
    }
  }
  return out;
}

double achieved_scale(const pre::Precalc& pre, const DemandMatrix& demand,
                      const std::vector<int>& adopted) {
  double th = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& e : demand.entries) {
    if (e.frac <= 0.0) continue;
    any = true;
    double t = 0.0;
    for (int id : adopted) {
      const auto& r = pre.routes[pre.candidates[id].route_idx];
      if (r.s == e.s && r.d == e.d) t += pre.candidates[id].capacity_gbps;
    }
    th = std::min(th, t / e.frac);
  }
  return any ? th : 0.0;
}

ProvisioningState extract_state(const Phase2Model& pm,
                                const optim::SolveResult& res,
                                const pre::Precalc& pre,
                                const DemandMatrix& demand) {
  ProvisioningState st;
  if (!res.feasible()) return st;
  for (std::size_t i = 0; i < pm.delta_vars.size(); ++i) {
    if (res.x[pm.delta_vars[i]] > 0.5) st.adopted.push_back(pm.delta_cand_ids[i]);
  }
  std::sort(st.adopted.begin(), st.adopted.end());
  st.th_gbps = achieved_scale(pre, demand, st.adopted);
  return st;
}

}  // namespace

void DemandMatrix::validate(const topo::Network& net) const {
  if (entries.empty()) fail("demand matrix is empty");
  const int n = static_cast<int>(net.nodes.size());
  double total = 0.0;
  std::set<std::pair<int, int>> seen;
  for (const auto& e : entries) {
    if (e.s < 0 || e.s >= n || e.d < 0 || e.d >= n)
      fail("demand pair references an unknown node");
    if (e.s == e.d) fail("demand pair with identical endpoints");
    if (!(e.frac >= 0.0) || !std::isfinite(e.frac))
      fail("demand fraction must be finite and non-negative");
    if (!seen.insert({e.s, e.d}).second) fail("duplicate demand pair");
    total += e.frac;
  }
  if (std::fabs(total - 1.0) > 1e-6) fail("demand fractions must sum to 1");
}

double DemandMatrix::frac(int s, int d) const {
  for (const auto& e : entries) {
    if (e.s == s && e.d == d) return e.frac;
  }
  return 0.0;
}

DemandMatrix uniform_demand(const topo::Network& net) {
  const int n = static_cast<int>(net.nodes.size());
  if (n < 2) fail("uniform demand needs at least two nodes");
  DemandMatrix dm;
  const double share = 1.0 / (static_cast<double>(n) * (n - 1));
  for (int s = 0; s < n; ++s) {
    for (int d = 0; d < n; ++d) {
      if (s != d) dm.entries.push_back({s, d, share});
    }
  }
  return dm;
}

double ProvisioningState::pair_capacity_gbps(const pre::Precalc& pre, int s,
                                             int d) const {
  double t = 0.0;
  for (int id : adopted) {
    const auto& c = pre.candidates[id];
    const auto& r = pre.routes[c.route_idx];
    if (r.s == s && r.d == d) t += c.capacity_gbps;
  }
  return t;
}

void ProvisioningState::validate(const pre::Precalc& pre,
                                 const topo::Network& net,
                                 const DemandMatrix& demand) const {
  if (!(th_gbps >= 0.0) || !std::isfinite(th_gbps))
    fail("throughput must be finite and non-negative");
  const int n_cand = static_cast<int>(pre.candidates.size());
  std::set<int> ids;
  std::set<std::tuple<int, int>> placements;  // route_idx, start_slot
  std::map<std::pair<int, int>, int> slot_owner;
  for (int id : adopted) {
    if (id < 0 || id >= n_cand) fail("adopted id out of range");
    if (!ids.insert(id).second) fail("candidate adopted twice");
    const auto& c = pre.candidates[id];
    if (c.ch.start_slot < 1 || c.ch.end_slot() > net.w_cur)
      fail("adopted channel outside the usable band");
    if (!placements.insert({c.route_idx, c.ch.start_slot}).second)
      fail("pair holds the same route and channel twice");
    const auto& r = pre.routes[c.route_idx];
    for (int l : r.link_ids) {
      for (int w = c.ch.start_slot; w <= c.ch.end_slot(); ++w) {
        if (!slot_owner.insert({{l, w}, id}).second)
          fail("slot " + std::to_string(w) + " on link " + std::to_string(l) +
               " claimed twice");
      }
    }
  }
  for (const auto& e : demand.entries) {
    if (e.frac <= 0.0) continue;
    if (th_gbps * e.frac > pair_capacity_gbps(pre, e.s, e.d) + kEps)
      fail("throughput not covered for pair " + std::to_string(e.s) + " -> " +
           std::to_string(e.d));
  }
}

Phase2Model build_phase2_model(const pre::Precalc& pre,
                               const topo::Network& net,
                               const DemandMatrix& demand) {
  demand.validate(net);
  Phase2Model pm;
  auto& m = pm.model;
  m.name = "provisioning";
  m.sense = optim::Sense::Maximize;
  pm.th_var = m.add_var("TH", 0.0, optim::kInf, optim::VarKind::Continuous, 1.0);

  auto pairs = demanded_pairs(pre, demand);

  // Keep one representative per spectral class: the capacity-maximal mode.
  // Any selection using a smaller sibling stays feasible with the same
  // spectrum when the representative replaces it, delivering at least as
  // much, so neither objective ever needs the siblings.
  std::map<ClassKey, int> best;
  for (const auto& p : pairs) {
    for (int id : p.cand_ids) {
      const auto& c = pre.candidates[id];
      auto [it, fresh] = best.try_emplace(class_of(c), id);
      if (!fresh &&
          c.capacity_gbps > pre.candidates[it->second].capacity_gbps) {
        it->second = id;
      }
    }
  }

  std::vector<std::vector<int>> slot_members(
      net.links.size() * static_cast<std::size_t>(net.w_cur + 1));
  for (const auto& p : pairs) {
    const std::string tag = pair_tag(p.s, p.d);
    int d_var = m.add_var("D_" + tag, 0.0, optim::kInf,
                          optim::VarKind::Continuous, 0.0);
    int t_var = m.add_var("T_" + tag, 0.0, optim::kInf,
                          optim::VarKind::Continuous, 0.0);
    std::vector<optim::Term> carried{{t_var, 1.0}};
    for (int id : p.cand_ids) {
      const auto& c = pre.candidates[id];
      if (best[class_of(c)] != id) continue;
      int dv = m.add_var("delta_" + std::to_string(id), 0.0, 1.0,
                         optim::VarKind::Binary, 0.0);
      pm.delta_vars.push_back(dv);
      pm.delta_cand_ids.push_back(id);
      carried.push_back({dv, -c.capacity_gbps});
      const auto& r = pre.routes[c.route_idx];
      for (int l : r.link_ids) {
        for (int w = c.ch.start_slot; w <= c.ch.end_slot(); ++w) {
          slot_members[static_cast<std::size_t>(l) * (net.w_cur + 1) + w]
              .push_back(dv);
        }
      }
    }
    m.add_constraint("demand_" + tag,
                     {{d_var, 1.0}, {pm.th_var, -p.frac}}, optim::Rel::Eq, 0.0);
    m.add_constraint("carried_" + tag, std::move(carried), optim::Rel::Eq, 0.0);
    m.add_constraint("deliver_" + tag, {{d_var, 1.0}, {t_var, -1.0}},
                     optim::Rel::Le, 0.0);
  }

  // A row per (link, slot) is only needed where two selections could clash.
  for (std::size_t l = 0; l < net.links.size(); ++l) {
    for (int w = 1; w <= net.w_cur; ++w) {
      const auto& members = slot_members[l * (net.w_cur + 1) + w];
      if (members.size() < 2) continue;
      std::vector<optim::Term> terms;
      terms.reserve(members.size());
      for (int dv : members) terms.push_back({dv, 1.0});
      m.add_constraint("slot_" + std::to_string(l) + "_" + std::to_string(w),
                       std::move(terms), optim::Rel::Le, 1.0);
    }
  }
  return pm;
}

PlanResult maximize_throughput(const pre::Precalc& pre,
                               const topo::Network& net,
                               const DemandMatrix& demand,
                               const optim::SolveOptions& opt) {
  Phase2Model pm = build_phase2_model(pre, net, demand);
  PlanResult out;
  out.solve = optim::solve_milp(pm.model, opt);
  out.state = extract_state(pm, out.solve, pre, demand);
  return out;
}

PlanResult remove_redundant(const pre::Precalc& pre, const topo::Network& net,
                            const DemandMatrix& demand, double th_target,
                            const optim::SolveOptions& opt) {
  if (!(th_target >= 0.0) || !std::isfinite(th_target))
    fail("throughput target must be finite and non-negative");
  Phase2Model pm = build_phase2_model(pre, net, demand);
  auto& m = pm.model;
  m.name = "thinning";
  m.sense = optim::Sense::Minimize;
  m.vars[pm.th_var].obj = 0.0;
  for (int dv : pm.delta_vars) m.vars[dv].obj = 1.0;
  // Slack absorbs solver round-off from the maximization run; capacities are
  // far coarser than this.
  m.add_constraint("floor", {{pm.th_var, 1.0}}, optim::Rel::Ge,
                   th_target - kEps * (1.0 + std::fabs(th_target)));
  PlanResult out;
  out.solve = optim::solve_milp(m, opt);
  out.state = extract_state(pm, out.solve, pre, demand);
  return out;
}

namespace {

// Mutable spectrum map: which adopted candidate owns each (link, slot).
class Occupancy {
 public:
  Occupancy(const pre::Precalc& pre, const topo::Network& net)
      : pre_(pre),
        w_cur_(net.w_cur),
        owner_(net.links.size() * static_cast<std::size_t>(net.w_cur + 1), -1) {}

  bool fits(int id, int ignore) const {
    const auto& c = pre_.candidates[id];
    const auto& r = pre_.routes[c.route_idx];
    for (int l : r.link_ids) {
      for (int w = c.ch.start_slot; w <= c.ch.end_slot(); ++w) {
        int v = owner_[cell(l, w)];
        if (v != -1 && v != ignore) return false;
      }
    }
    return true;
  }

  void set(int id, int value) {
    const auto& c = pre_.candidates[id];
    const auto& r = pre_.routes[c.route_idx];
    for (int l : r.link_ids) {
      for (int w = c.ch.start_slot; w <= c.ch.end_slot(); ++w) {
        owner_[cell(l, w)] = value;
      }
    }
  }

 private:
  std::size_t cell(int l, int w) const {
    return static_cast<std::size_t>(l) * (w_cur_ + 1) + w;
  }

  const pre::Precalc& pre_;
  int w_cur_;
  std::vector<int> owner_;
};

struct Action {
  bool swap = false;
  int cand = -1;
  int removed_pos = -1;  // position in the adoption list, swaps only
  double gain = 0.0;
};

}  // namespace

ProvisioningState sequential_loading(const pre::Precalc& pre,
                                     const topo::Network& net,
                                     const DemandMatrix& demand,
                                     const LoadOptions& opt) {
  if (!(opt.step_gbps > 0.0) || !std::isfinite(opt.step_gbps))
    fail("load step must be positive and finite");
  if (opt.max_rounds < 1) fail("max_rounds must be positive");
  demand.validate(net);

  const auto& cands = pre.candidates;
  auto pairs = demanded_pairs(pre, demand);

  // Per spectral class, the capacity ladder a lightpath can climb in place.
  std::map<ClassKey, std::vector<int>> ladder;
  for (const auto& p : pairs) {
    for (int id : p.cand_ids) ladder[class_of(cands[id])].push_back(id);
  }
  std::vector<int> bauds;
  for (auto& [key, ids] : ladder) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      return cands[a].capacity_gbps < cands[b].capacity_gbps;
    });
    if (std::find(bauds.begin(), bauds.end(), std::get<2>(key)) == bauds.end())
      bauds.push_back(std::get<2>(key));
  }
  std::sort(bauds.begin(), bauds.end());

  auto next_up = [&](int id) {
    const auto& ids = ladder[class_of(cands[id])];
    auto it = std::find(ids.begin(), ids.end(), id);
    return (it != ids.end() && it + 1 != ids.end()) ? *(it + 1) : -1;
  };

  std::mt19937 rng(opt.seed);
  auto baud_rank = [&](int gbaud, const std::vector<int>& order) {
    switch (opt.policy) {
      case BaudPolicy::High:
        return -gbaud;
      case BaudPolicy::Low:
        return gbaud;
      case BaudPolicy::Random: {
        auto it = std::find(order.begin(), order.end(), gbaud);
        return static_cast<int>(it - order.begin());
      }
    }
    return 0;
  };

  Occupancy occ(pre, net);
  ProvisioningState st;
  double th = 0.0;

  for (long long round = 1; round <= opt.max_rounds; ++round) {
    const double next_th = th + opt.step_gbps;
    for (const auto& p : pairs) {
      const double target = next_th * p.frac;
      double carried = 0.0;
      std::vector<int> owned;  // positions in the adoption list
      for (std::size_t i = 0; i < st.adopted.size(); ++i) {
        const auto& r = pre.routes[cands[st.adopted[i]].route_idx];
        if (r.s == p.s && r.d == p.d) {
          owned.push_back(static_cast<int>(i));
          carried += cands[st.adopted[i]].capacity_gbps;
        }
      }
      auto reached = [&] { return carried >= target - kEps; };

      // Free capacity first: climb each lightpath's mode ladder in place.
      for (int pos : owned) {
        while (!reached()) {
          int id = st.adopted[pos];
          int up = next_up(id);
          if (up < 0) break;
          occ.set(id, -1);
          occ.set(up, up);
          st.adopted[pos] = up;
          carried += cands[up].capacity_gbps - cands[id].capacity_gbps;
        }
        if (reached()) break;
      }
      if (reached()) continue;

      // One paid action: re-form an owned lightpath or set up a new one.
      std::vector<Action> actions;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (int id : p.cand_ids) {
        if (!occ.fits(id, -1)) continue;
        actions.push_back({false, id, -1, cands[id].capacity_gbps});
        best_gain = std::max(best_gain, actions.back().gain);
      }
      for (std::size_t oi = 0; oi < owned.size(); ++oi) {
        int old_id = st.adopted[owned[oi]];
        for (int id : p.cand_ids) {
          if (class_of(cands[id]) == class_of(cands[old_id])) continue;
          double gain = cands[id].capacity_gbps - cands[old_id].capacity_gbps;
          if (gain <= kEps) continue;
          if (!occ.fits(id, old_id)) continue;
          actions.push_back({true, id, static_cast<int>(oi), gain});
          best_gain = std::max(best_gain, gain);
        }
      }
      if (actions.empty() || carried + best_gain < target - kEps) {
        st.th_gbps = th;
        return st;
      }

      std::vector<int> order = bauds;
      if (opt.policy == BaudPolicy::Random) {
        for (std::size_t i = order.size(); i > 1; --i) {
          std::swap(order[i - 1], order[rng() % i]);
        }
      }
      auto key = [&](const Action& a) {
        const auto& c = cands[a.cand];
        return std::make_tuple(carried + a.gain >= target - kEps ? 0 : 1,
                               baud_rank(c.gbaud, order), a.gain, c.ch.b_slots,
                               c.ch.start_slot, a.swap ? 0 : 1, a.removed_pos,
                               a.cand);
      };
      const Action* chosen = &actions[0];
      for (const auto& a : actions) {
        if (key(a) < key(*chosen)) chosen = &a;
      }
      if (chosen->swap) {
        int pos = owned[chosen->removed_pos];
        occ.set(st.adopted[pos], -1);
        occ.set(chosen->cand, chosen->cand);
        st.adopted[pos] = chosen->cand;
      } else {
        occ.set(chosen->cand, chosen->cand);
        st.adopted.push_back(chosen->cand);
      }
    }
    th = next_th;
  }
  fail("load rounds exhausted without the spectrum filling up");
}

}  // namespace fon::thru
