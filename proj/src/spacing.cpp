#include "fonplan/spacing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "fonplan/physical.hpp"

namespace fon::spc {

namespace {

std::string tag2(const char* stem, int i, int j) {
  return std::string(stem) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

// Interference scale: victim PSD cubed over one-span amplifier noise, the
// factor turning a per-span efficiency into a per-span NLI-to-ASE ratio.
double eta_scale(const SpacingProblem& prob) {
  double g = prob.fib.psd_w_hz;
  return g * g * g / prob.g_ase_span;
}

}  // namespace

bool SpacingProblem::before(int i, int j) const {
  const auto& a = paths[i];
  const auto& b = paths[j];
  if (a.start_slot != b.start_slot) return a.start_slot < b.start_slot;
  return i < j;
}

double SpacingProblem::center_ghz(int i) const {
  const auto& p = paths[i];
  return (p.start_slot - 1 + p.b_slots / 2.0) * f_grid_ghz;
}

double SpacingProblem::weight(int i) const {
  const auto& p = paths[i];
  return std::pow(10.0, (p.thr_db - p.snr_best_db) / 10.0);
}

const phys::XciFit& SpacingProblem::fit_for(int b_victim,
                                            int b_interferer) const {
  auto it = fits.find({b_victim, b_interferer});
  if (it == fits.end())
    throw std::logic_error("no interference envelope for bandwidth pair " +
                           std::to_string(b_victim) + "x" +
                           std::to_string(b_interferer));
  return it->second;
}

void compute_neighbors(SpacingProblem& prob) {
  int n = static_cast<int>(prob.paths.size());
  prob.y1.assign(n, std::vector<char>(n, 0));
  prob.y2.assign(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    int gi = prob.paths[i].start_slot;
    int best_lo = -1, best_hi = -1;
    int d_lo = std::numeric_limits<int>::max();
    int d_hi = std::numeric_limits<int>::max();
    for (int j = 0; j < n; ++j) {
      if (j == i || !prob.share[i][j]) continue;
      int d = prob.paths[j].start_slot - gi;
      if (d < 0 && -d < d_lo) {
        d_lo = -d;
        best_lo = j;
      } else if (d > 0 && d < d_hi) {
        d_hi = d;
        best_hi = j;
      } else if (d == 0 && d < d_lo) {
        // Equal starts only happen between lightpaths that do not share a
        // link with each other; treat the first as the lower side.
        d_lo = 0;
        best_lo = j;
      }
    }
    if (best_lo >= 0) prob.y1[i][best_lo] = 1;
    if (best_hi >= 0) prob.y1[i][best_hi] = 1;
  }
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      if (!prob.y1[i][m]) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i || !prob.y1[m][j] || !prob.share[i][j]) continue;
        prob.y2[i][j] = 1;
      }
    }
    // Keep the marked set at four: drop the farthest second-tier entries.
    std::vector<int> marked;
    for (int j = 0; j < n; ++j)
      if (prob.y1[i][j] || prob.y2[i][j]) marked.push_back(j);
    if (static_cast<int>(marked.size()) > 4) {
      std::vector<int> extra;
      for (int j : marked)
        if (!prob.y1[i][j]) extra.push_back(j);
      std::sort(extra.begin(), extra.end(), [&](int a, int b) {
        int da = std::abs(prob.paths[a].start_slot - prob.paths[i].start_slot);
        int db = std::abs(prob.paths[b].start_slot - prob.paths[i].start_slot);
        if (da != db) return da > db;
        return a > b;
      });
      for (int j : extra) {
        if (static_cast<int>(marked.size()) <= 4) break;
        prob.y2[i][j] = 0;
        marked.erase(std::find(marked.begin(), marked.end(), j));
      }
    }
  }
}

SpacingProblem make_problem(const pre::Precalc& pre, const topo::Network& net,
                            const thru::ProvisioningState& state,
                            const modes::Catalog& cat,
                            const phys::FiberConfig& fib, int q_segments) {
  SpacingProblem prob;
  prob.w = net.w;
  prob.f_grid_ghz = net.f_grid_ghz;
  prob.fib = fib;
  prob.g_ase_span = phys::ase_psd(1, fib.fp);

  std::set<int> footprints;
  for (const auto& t : cat.transceivers) footprints.insert(t.b_slots);
  prob.n_bandwidths = std::max<int>(1, static_cast<int>(footprints.size()));

  for (int id : state.adopted) {
    if (id < 0 || id >= static_cast<int>(pre.candidates.size()))
      throw std::invalid_argument("adopted candidate id out of range");
    const auto& c = pre.candidates[id];
    const auto& r = pre.routes[c.route_idx];
    const auto& m = cat.modes[c.mode_idx];
    SpacedLightpath lp;
    lp.cand_id = id;
    lp.link_ids = r.link_ids;
    lp.n_spans = r.n_spans;
    lp.start_slot = c.ch.start_slot;
    lp.b_slots = c.ch.b_slots;
    lp.gbaud = c.gbaud;
    lp.thr_db = m.snr_threshold_db;
    lp.snr_best_db = c.snr_best_db;
    lp.capacity_gbps = c.capacity_gbps;
    lp.mode_label = m.label();
    prob.paths.push_back(std::move(lp));
  }

  int n = static_cast<int>(prob.paths.size());
  prob.share.assign(n, std::vector<char>(n, 0));
  prob.shared_spans.assign(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    std::set<int> li(prob.paths[i].link_ids.begin(),
                     prob.paths[i].link_ids.end());
    for (int j = i + 1; j < n; ++j) {
      int spans = 0;
      for (int l : prob.paths[j].link_ids)
        if (li.count(l)) spans += net.links[l].n_spans;
      if (spans > 0) {
        prob.share[i][j] = prob.share[j][i] = 1;
        prob.shared_spans[i][j] = prob.shared_spans[j][i] = spans;
      }
    }
  }

  compute_neighbors(prob);

  std::set<int> widths;
  for (const auto& p : prob.paths) widths.insert(p.b_slots);
  for (int bv : widths)
    for (int bi : widths)
      prob.fits.emplace(std::make_pair(bv, bi),
                        phys::fit_xci_piecewise(bv, bi, prob.f_grid_ghz,
                                                prob.w * prob.f_grid_ghz,
                                                fib.fp, q_segments));
  return prob;
}

Phase4Model build_phase4_model(const SpacingProblem& prob,
                               const Strategy& strat, bool nearest_only) {
  Phase4Model pm;
  pm.nearest_only = nearest_only;
  auto& m = pm.model;
  m.name = "spacing";
  m.sense = optim::Sense::Minimize;
  int n = static_cast<int>(prob.paths.size());

  pm.x_net_var = m.add_var("Xnet", 0.0, optim::kInf,
                           optim::VarKind::Continuous, 1.0);
  m.minmax_epigraph_var = pm.x_net_var;

  pm.f_vars.resize(n);
  for (int i = 0; i < n; ++i) {
    double half = prob.paths[i].b_slots * prob.f_grid_ghz / 2.0;
    pm.f_vars[i] =
        m.add_var("f_" + std::to_string(i), half,
                  prob.w * prob.f_grid_ghz - half, optim::VarKind::Continuous);
  }

  double s = eta_scale(prob);
  auto pair_active = [&](int i, int j) {
    if (!prob.share[i][j]) return false;
    return !nearest_only || prob.neighbor(i, j);
  };

  // Scaled interference envelope variables, one per victim/interferer pair,
  // bounded below by every chord of the fitted curve at the pair's spacing.
  std::map<std::pair<int, int>, int> eta;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i || !pair_active(i, j)) continue;
      int v = m.add_var(tag2("eta", i, j), 0.0, optim::kInf,
                        optim::VarKind::Continuous);
      eta[{i, j}] = v;
      const auto& fit =
          prob.fit_for(prob.paths[i].b_slots, prob.paths[j].b_slots);
      int hi = prob.before(i, j) ? j : i;
      int lo = hi == i ? j : i;
      for (int q = 0; q < fit.segments(); ++q) {
        m.add_constraint(
            tag2("fit", i, j) + "_" + std::to_string(q),
            {{v, -1.0},
             {pm.f_vars[hi], s * fit.a[q]},
             {pm.f_vars[lo], -s * fit.a[q]}},
            optim::Rel::Le, -s * fit.b[q]);
      }
    }
  }

  // Per-link load: one unit of amplifier noise plus every co-riding
  // interference term; the per-lightpath sum, weighted by how much SNR
  // headroom the mode leaves, stays under the network objective.
  for (int i = 0; i < n; ++i) {
    std::vector<optim::Term> cap{{pm.x_net_var, -1.0}};
    double wt = prob.weight(i);
    for (int l : prob.paths[i].link_ids) {
      int xl = m.add_var(tag2("xl", i, l), 0.0, optim::kInf,
                         optim::VarKind::Continuous);
      std::vector<optim::Term> row{{xl, -1.0}};
      for (int j = 0; j < n; ++j) {
        if (j == i || !pair_active(i, j)) continue;
        const auto& lj = prob.paths[j].link_ids;
        if (std::find(lj.begin(), lj.end(), l) == lj.end()) continue;
        row.push_back({eta.at({i, j}), 1.0});
      }
      m.add_constraint(tag2("load", i, l), std::move(row), optim::Rel::Le,
                       -1.0);
      cap.push_back({xl, wt});
    }
    if (!prob.paths[i].link_ids.empty())
      m.add_constraint("cap_" + std::to_string(i), std::move(cap),
                       optim::Rel::Le, 0.0);
  }

  // Non-overlap between spectrally consecutive sharers per link; farther
  // pairs follow by transitivity of the frozen order.
  std::set<std::pair<int, int>> emitted;
  std::map<int, std::vector<int>> on_link;
  for (int i = 0; i < n; ++i)
    for (int l : prob.paths[i].link_ids) on_link[l].push_back(i);
  for (auto& [l, members] : on_link) {
    std::sort(members.begin(), members.end(),
              [&](int a, int b) { return prob.before(a, b); });
    for (size_t k = 0; k + 1 < members.size(); ++k) {
      int a = members[k], b = members[k + 1];
      if (!emitted.insert({a, b}).second) continue;
      double gap =
          (prob.paths[a].b_slots + prob.paths[b].b_slots) * prob.f_grid_ghz /
          2.0;
      m.add_constraint(tag2("order", a, b),
                       {{pm.f_vars[b], 1.0}, {pm.f_vars[a], -1.0}},
                       optim::Rel::Ge, gap);
    }
  }

  apply_strategy(pm, prob, strat);
  return pm;
}

void apply_strategy(Phase4Model& pm, const SpacingProblem& prob,
                    const Strategy& strat) {
  if (strat.kind == Strategy::Kind::Cso) return;
  if (strat.h_set_ghz.empty())
    throw std::invalid_argument("spacing strategy needs candidate values");
  int n = static_cast<int>(prob.paths.size());
  auto& m = pm.model;

  double lo_all = *std::min_element(strat.h_set_ghz.begin(),
                                    strat.h_set_ghz.end());
  double hi_all = *std::max_element(strat.h_set_ghz.begin(),
                                    strat.h_set_ghz.end());

  std::vector<double> h_of(n, lo_all);
  if (strat.kind == Strategy::Kind::Fix) {
    if (strat.h_set_ghz.size() != 1)
      throw std::invalid_argument("fixed spacing takes exactly one value");
  } else if (strat.kind == Strategy::Kind::CanRandom) {
    std::mt19937 rng(strat.seed);
    for (int i = 0; i < n; ++i)
      h_of[i] = strat.h_set_ghz[rng() % strat.h_set_ghz.size()];
  }

  // One spacing window per nearest-neighbor pair, seen from the upper
  // channel: fixed pitch stretchable over the distinct footprints (Fix),
  // the full candidate interval (CanOpt), or a drawn floor (CanRandom).
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i || !prob.y1[i][j] || !prob.before(j, i)) continue;
      std::vector<optim::Term> up{{pm.f_vars[i], 1.0}, {pm.f_vars[j], -1.0}};
      double lo = lo_all, hi = hi_all;
      if (strat.kind == Strategy::Kind::Fix) {
        lo = lo_all;
        hi = lo_all * prob.n_bandwidths;
      } else if (strat.kind == Strategy::Kind::CanRandom) {
        lo = h_of[i];
      }
      m.add_constraint(tag2("pitch_lo", i, j), up, optim::Rel::Ge, lo);
      m.add_constraint(tag2("pitch_hi", i, j), std::move(up), optim::Rel::Le,
                       hi);
    }
  }

  // Fix and CanRandom adopt the placement as-is: feasibility only.
  if (strat.kind == Strategy::Kind::Fix ||
      strat.kind == Strategy::Kind::CanRandom)
    m.vars[pm.x_net_var].obj = 0.0;
}

SpacingSolution round_to_grid(const SpacingProblem& prob,
                              const std::vector<double>& f_cont) {
  int n = static_cast<int>(prob.paths.size());
  if (static_cast<int>(f_cont.size()) != n)
    throw std::invalid_argument("frequency vector size mismatch");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (f_cont[a] != f_cont[b]) return f_cont[a] < f_cont[b];
    return a < b;
  });

  std::vector<int> k(n, 0);
  for (int idx = 0; idx < n; ++idx) {
    int i = order[idx];
    int b = prob.paths[i].b_slots;
    double want = f_cont[i] / prob.f_grid_ghz - b / 2.0;
    k[i] = std::clamp<int>(static_cast<int>(std::lround(want)), 0,
                           prob.w - b);
    for (int pdx = 0; pdx < idx; ++pdx) {
      int j = order[pdx];
      if (prob.share[i][j]) k[i] = std::max(k[i], k[j] + prob.paths[j].b_slots);
    }
  }
  for (int idx = n - 1; idx >= 0; --idx) {
    int i = order[idx];
    k[i] = std::min(k[i], prob.w - prob.paths[i].b_slots);
    for (int ndx = idx + 1; ndx < n; ++ndx) {
      int j = order[ndx];
      if (prob.share[i][j]) k[i] = std::min(k[i], k[j] - prob.paths[i].b_slots);
    }
  }
  for (int idx = 0; idx < n; ++idx) {
    int i = order[idx];
    if (k[i] < 0) throw std::logic_error("slot repair failed: band overflow");
    for (int pdx = 0; pdx < idx; ++pdx) {
      int j = order[pdx];
      if (prob.share[i][j] && k[i] < k[j] + prob.paths[j].b_slots)
        throw std::logic_error("slot repair failed: overlap");
    }
  }

  SpacingSolution sol;
  sol.f_ghz.resize(n);
  sol.start_slot.resize(n);
  for (int i = 0; i < n; ++i) {
    sol.start_slot[i] = k[i] + 1;
    sol.f_ghz[i] = (k[i] + prob.paths[i].b_slots / 2.0) * prob.f_grid_ghz;
  }
  return sol;
}

std::vector<double> evaluate_qot(const SpacingProblem& prob,
                                 const std::vector<double>& f_ghz) {
  int n = static_cast<int>(prob.paths.size());
  if (static_cast<int>(f_ghz.size()) != n)
    throw std::invalid_argument("frequency vector size mismatch");
  std::vector<double> q(n, 0.0);
  for (int i = 0; i < n; ++i) {
    std::vector<phys::Interferer> xs;
    for (int j = 0; j < n; ++j) {
      if (j == i || !prob.share[i][j]) continue;
      xs.push_back({std::fabs(f_ghz[i] - f_ghz[j]),
                    prob.paths[j].b_slots * prob.f_grid_ghz,
                    prob.shared_spans[i][j], prob.fib.psd_w_hz});
    }
    double ase = phys::ase_psd(prob.paths[i].n_spans, prob.fib.fp);
    double nli = phys::nli_psd(prob.fib.psd_w_hz, xs, prob.fib.fp);
    q[i] = phys::snr_db(prob.fib.psd_w_hz, ase, nli) - prob.paths[i].thr_db;
  }
  return q;
}

double reduced_network_x(const SpacingProblem& prob,
                         const std::vector<double>& f_ghz, bool nearest_only) {
  int n = static_cast<int>(prob.paths.size());
  if (static_cast<int>(f_ghz.size()) != n)
    throw std::invalid_argument("frequency vector size mismatch");
  if (n == 0) return 1.0;
  double s = eta_scale(prob);
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int l : prob.paths[i].link_ids) {
      double load = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i || !prob.share[i][j]) continue;
        if (nearest_only && !prob.neighbor(i, j)) continue;
        const auto& lj = prob.paths[j].link_ids;
        if (std::find(lj.begin(), lj.end(), l) == lj.end()) continue;
        const auto& fit =
            prob.fit_for(prob.paths[i].b_slots, prob.paths[j].b_slots);
        load += s * fit.eval(std::fabs(f_ghz[i] - f_ghz[j]));
      }
      sum += load;
    }
    best = std::max(best, prob.weight(i) * sum);
  }
  return best;
}

StrategyOutcome run_strategy(const SpacingProblem& prob,
                             const Strategy& strat) {
  StrategyOutcome out;
  Phase4Model pm = build_phase4_model(prob, strat);
  optim::SolveResult res = optim::solve_lp(pm.model);
  if (res.status != optim::SolveStatus::Optimal) return out;
  out.feasible = true;
  int n = static_cast<int>(prob.paths.size());
  out.f_cont.resize(n);
  for (int i = 0; i < n; ++i) out.f_cont[i] = res.x[pm.f_vars[i]];
  out.x_net_lp = reduced_network_x(prob, out.f_cont);
  out.sol = round_to_grid(prob, out.f_cont);
  out.sol.q_db = evaluate_qot(prob, out.sol.f_ghz);
  out.sol.x_network_db =
      10.0 * std::log10(reduced_network_x(prob, out.sol.f_ghz));
  return out;
}

void write_spacing_csv(const SpacingProblem& prob, const SpacingSolution& sol,
                       std::ostream& os) {
  os << "cand_id,start_slot,b_slots,center_ghz,min_spacing_ghz,mode,q_db\n";
  int n = static_cast<int>(prob.paths.size());
  for (int i = 0; i < n; ++i) {
    double nearest = -1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i || !prob.share[i][j]) continue;
      double d = std::fabs(sol.f_ghz[i] - sol.f_ghz[j]);
      if (nearest < 0.0 || d < nearest) nearest = d;
    }
    const auto& p = prob.paths[i];
    os << p.cand_id << "," << sol.start_slot[i] << "," << p.b_slots << ","
       << sol.f_ghz[i] << "," << nearest << "," << p.mode_label << ","
       << (sol.q_db.empty() ? 0.0 : sol.q_db[i]) << "\n";
  }
}

}  // namespace fon::spc
