#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "fonplan/modes.hpp"
#include "fonplan/optim.hpp"
#include "fonplan/physical.hpp"
#include "fonplan/precalc.hpp"
#include "fonplan/spacing.hpp"
#include "fonplan/throughput.hpp"
#include "fonplan/topology.hpp"

using namespace fon;

namespace {

phys::FiberConfig fiber_at(double psd_uw_ghz) {
  phys::FiberConfig fc;
  fc.psd_w_hz = phys::uw_per_ghz(psd_uw_ghz);
  return fc;
}

struct Inst {
  topo::Network net;
  modes::Catalog cat;
  pre::Precalc pre;
  thru::ProvisioningState st;
  phys::FiberConfig fib;

  spc::SpacingProblem problem(int q_segments = 10) const {
    return spc::make_problem(pre, net, st, cat, fib, q_segments);
  }
};

// One link, channels placed at the given (start_slot, b_slots) positions,
// one mode shared by everyone.
Inst ptp_inst(double length_km, int w,
              const std::vector<std::pair<int, int>>& placement,
              double psd_uw_ghz, double thr_db) {
  Inst in;
  in.net.nodes = {"a", "b"};
  int spans = static_cast<int>(std::ceil(length_km / in.net.span_km));
  in.net.links.push_back({0, 1, length_km, spans});
  in.net.w = w;
  in.net.w_cur = w;
  in.fib = fiber_at(psd_uw_ghz);

  modes::Mode m;
  m.mf = "mode";
  m.fec = "x";
  m.snr_threshold_db = thr_db;
  std::vector<int> widths;
  for (const auto& pl : placement) widths.push_back(pl.second);
  std::sort(widths.begin(), widths.end());
  widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
  for (int b : widths) {
    in.cat.transceivers.push_back({8 * b, b});
    m.gbps_by_baud[8 * b] = 100.0;
  }
  in.cat.modes.push_back(m);

  topo::Route r;
  r.s = 0;
  r.d = 1;
  r.k = 1;
  r.node_seq = {0, 1};
  r.link_ids = {0};
  r.length_km = length_km;
  r.n_spans = spans;
  in.pre.routes.push_back(r);

  double snr_best =
      phys::snr_db(in.fib.psd_w_hz, phys::ase_psd(spans, in.fib.fp), 0.0);
  int id = 0;
  for (const auto& pl : placement) {
    pre::Candidate c;
    c.id = id;
    c.route_idx = 0;
    c.ch = {pl.first, pl.second};
    c.mode_idx = 0;
    c.gbaud = 8 * pl.second;
    c.capacity_gbps = 100.0;
    c.snr_best_db = snr_best;
    in.pre.candidates.push_back(c);
    in.st.adopted.push_back(id++);
  }
  in.st.th_gbps = 100.0;
  return in;
}

// Three-node line with two overlapping routes a-b and a-b-c; the second
// argument of each placement entry picks the route.
Inst overlap_inst(double leg_km, int w,
                  const std::vector<std::pair<int, int>>& start_and_route,
                  double psd_uw_ghz, double thr_db) {
  Inst in;
  in.net.nodes = {"a", "b", "c"};
  int spans = static_cast<int>(std::ceil(leg_km / in.net.span_km));
  in.net.links.push_back({0, 1, leg_km, spans});
  in.net.links.push_back({1, 2, leg_km, spans});
  in.net.w = w;
  in.net.w_cur = w;
  in.fib = fiber_at(psd_uw_ghz);

  in.cat.transceivers.push_back({16, 2});
  modes::Mode m;
  m.mf = "mode";
  m.fec = "x";
  m.snr_threshold_db = thr_db;
  m.gbps_by_baud[16] = 100.0;
  in.cat.modes.push_back(m);

  topo::Route r1;
  r1.s = 0;
  r1.d = 1;
  r1.k = 1;
  r1.node_seq = {0, 1};
  r1.link_ids = {0};
  r1.length_km = leg_km;
  r1.n_spans = spans;
  topo::Route r2;
  r2.s = 0;
  r2.d = 2;
  r2.k = 1;
  r2.node_seq = {0, 1, 2};
  r2.link_ids = {0, 1};
  r2.length_km = 2 * leg_km;
  r2.n_spans = 2 * spans;
  in.pre.routes = {r1, r2};

  int id = 0;
  for (const auto& [start, route] : start_and_route) {
    const auto& r = in.pre.routes[route];
    pre::Candidate c;
    c.id = id;
    c.route_idx = route;
    c.ch = {start, 2};
    c.mode_idx = 0;
    c.gbaud = 16;
    c.capacity_gbps = 100.0;
    c.snr_best_db =
        phys::snr_db(in.fib.psd_w_hz, phys::ase_psd(r.n_spans, in.fib.fp), 0.0);
    in.pre.candidates.push_back(c);
    in.st.adopted.push_back(id++);
  }
  in.st.th_gbps = 100.0;
  return in;
}

int rows_with_prefix(const optim::LinearModel& m, const std::string& p) {
  int c = 0;
  for (const auto& con : m.cons)
    if (con.name.rfind(p, 0) == 0) ++c;
  return c;
}

int vars_with_prefix(const optim::LinearModel& m, const std::string& p) {
  int c = 0;
  for (const auto& v : m.vars)
    if (v.name.rfind(p, 0) == 0) ++c;
  return c;
}

// Complete search over center frequencies on a 1-GHz lattice, channel order
// fixed, consecutive spacing at least the half-bandwidth sum.
double brute_min_x(const spc::SpacingProblem& prob) {
  int n = static_cast<int>(prob.paths.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return prob.before(a, b); });
  double band = prob.w * prob.f_grid_ghz;
  std::vector<double> f(n, 0.0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, double)> place = [&](int idx, double prev_c) {
    if (idx == n) {
      best = std::min(best, spc::reduced_network_x(prob, f));
      return;
    }
    int i = order[idx];
    double half = prob.paths[i].b_slots * prob.f_grid_ghz / 2.0;
    double lo = half;
    if (idx > 0) {
      int p = order[idx - 1];
      lo = std::max(lo, prev_c + (prob.paths[p].b_slots +
                                  prob.paths[i].b_slots) *
                                     prob.f_grid_ghz / 2.0);
    }
    for (double c = lo; c <= band - half + 1e-9; c += 1.0) {
      f[i] = c;
      place(idx + 1, c);
    }
  };
  place(0, 0.0);
  return best;
}

double db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace

TEST_CASE("nearest sharers are marked per side plus one hop beyond") {
  Inst in = ptp_inst(600, 20, {{1, 2}, {5, 2}, {9, 2}}, 15, 15.2);
  auto prob = in.problem();
  REQUIRE(prob.paths.size() == 3);

  CHECK(prob.y1[0][1] == 1);
  CHECK(prob.y1[0][2] == 0);
  CHECK(prob.y1[1][0] == 1);
  CHECK(prob.y1[1][2] == 1);
  CHECK(prob.y1[2][1] == 1);
  CHECK(prob.y1[2][0] == 0);

  CHECK(prob.y2[0][2] == 1);
  CHECK(prob.y2[2][0] == 1);
  CHECK(prob.y2[1][0] == 0);
  CHECK(prob.y2[1][2] == 0);

  for (int i = 0; i < 3; ++i) {
    CHECK(prob.y1[i][i] == 0);
    CHECK(prob.y2[i][i] == 0);
  }

  Inst solo = ptp_inst(600, 20, {{1, 2}}, 15, 15.2);
  auto sp = solo.problem();
  CHECK(sp.y1[0][0] == 0);
  CHECK(sp.y2[0][0] == 0);
}

TEST_CASE("neighbor reduction keeps the envelope count linear") {
  std::vector<std::pair<int, int>> placement;
  for (int i = 0; i < 10; ++i) placement.push_back({1 + 2 * i, 2});
  Inst in = ptp_inst(600, 40, placement, 15, 15.2);
  auto prob = in.problem();

  for (int i = 0; i < 10; ++i) {
    int marked = 0;
    for (int j = 0; j < 10; ++j)
      if (prob.neighbor(i, j)) ++marked;
    CHECK(marked <= 4);
  }

  auto reduced = spc::build_phase4_model(prob, spc::Strategy::cso(), true);
  auto full = spc::build_phase4_model(prob, spc::Strategy::cso(), false);
  int q = prob.fit_for(2, 2).segments();
  CHECK(q == 10);
  CHECK(vars_with_prefix(full.model, "eta_") == 10 * 9);
  CHECK(rows_with_prefix(full.model, "fit_") == 10 * 9 * q);
  CHECK(vars_with_prefix(reduced.model, "eta_") <= 4 * 10);
  CHECK(rows_with_prefix(reduced.model, "fit_") <= 4 * q * 10);
  CHECK(rows_with_prefix(reduced.model, "fit_") <
        rows_with_prefix(full.model, "fit_"));
}

TEST_CASE("lone lightpath sees only amplifier noise") {
  Inst in = ptp_inst(600, 20, {{5, 2}}, 15, 15.2);
  auto prob = in.problem();
  auto out = spc::run_strategy(prob, spc::Strategy::cso());
  REQUIRE(out.feasible);
  CHECK(out.x_net_lp == doctest::Approx(prob.weight(0)).epsilon(1e-9));

  double snr_best = prob.paths[0].snr_best_db;
  REQUIRE(out.sol.q_db.size() == 1);
  CHECK(out.sol.q_db[0] == doctest::Approx(snr_best - 15.2).epsilon(1e-9));

  Inst flat = ptp_inst(600, 20, {{5, 2}}, 15, snr_best);
  auto pf = flat.problem();
  auto qs = spc::evaluate_qot(pf, {pf.center_ghz(0)});
  CHECK(qs[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two sharers spread to the band edges") {
  Inst in = ptp_inst(600, 16, {{1, 2}, {3, 2}}, 15, 15.2);
  auto prob = in.problem();
  auto pm = spc::build_phase4_model(prob, spc::Strategy::cso());
  auto res = optim::solve_lp(pm.model);
  REQUIRE(res.status == optim::SolveStatus::Optimal);

  double f0 = res.x[pm.f_vars[0]];
  double f1 = res.x[pm.f_vars[1]];
  CHECK(f0 == doctest::Approx(12.5).epsilon(1e-7));
  CHECK(f1 == doctest::Approx(16 * 12.5 - 12.5).epsilon(1e-7));

  // At the optimum the objective is exactly the evaluated placement.
  double eval = spc::reduced_network_x(prob, {f0, f1});
  CHECK(res.objective == doctest::Approx(eval).epsilon(1e-9));

  // Spreading beats the incoming back-to-back placement.
  double packed =
      spc::reduced_network_x(prob, {prob.center_ghz(0), prob.center_ghz(1)});
  CHECK(eval < packed);
}

TEST_CASE("continuous optimum matches a fine grid search") {
  SUBCASE("three channels, loose band") {
    Inst in = ptp_inst(600, 12, {{1, 2}, {3, 2}, {5, 2}}, 15, 15.2);
    auto prob = in.problem();
    auto out = spc::run_strategy(prob, spc::Strategy::cso());
    REQUIRE(out.feasible);
    double brute = brute_min_x(prob);
    CHECK(out.x_net_lp <= brute * (1 + 1e-9));
    CHECK(std::fabs(db(brute) - db(out.x_net_lp)) <= 0.05);
  }
  SUBCASE("five channels, tight band") {
    Inst in = ptp_inst(600, 12, {{1, 2}, {3, 2}, {5, 2}, {7, 2}, {9, 2}}, 20,
                       15.2);
    auto prob = in.problem();
    auto out = spc::run_strategy(prob, spc::Strategy::cso());
    REQUIRE(out.feasible);
    double brute = brute_min_x(prob);
    CHECK(out.x_net_lp <= brute * (1 + 1e-9));
    CHECK(std::fabs(db(brute) - db(out.x_net_lp)) <= 0.05);
  }
  SUBCASE("mixed widths") {
    Inst in = ptp_inst(600, 11, {{1, 2}, {3, 4}, {7, 2}}, 15, 15.2);
    auto prob = in.problem();
    auto out = spc::run_strategy(prob, spc::Strategy::cso());
    REQUIRE(out.feasible);
    double brute = brute_min_x(prob);
    CHECK(out.x_net_lp <= brute * (1 + 1e-9));
    CHECK(std::fabs(db(brute) - db(out.x_net_lp)) <= 0.05);
  }
}

TEST_CASE("strategy windows constrain nearest-neighbor pitch") {
  std::vector<std::pair<int, int>> placement;
  for (int i = 0; i < 5; ++i) placement.push_back({1 + 2 * i, 2});
  Inst in = ptp_inst(600, 30, placement, 15, 15.2);
  auto prob = in.problem();
  REQUIRE(prob.n_bandwidths == 1);

  auto fix = spc::run_strategy(prob, spc::Strategy::fix(37.5));
  REQUIRE(fix.feasible);
  for (int i = 1; i < 5; ++i)
    CHECK(fix.f_cont[i] - fix.f_cont[i - 1] ==
          doctest::Approx(37.5).epsilon(1e-7));
  // 37.5 GHz is three slots, so the grid snap keeps the pitch.
  for (int i = 1; i < 5; ++i)
    CHECK(fix.sol.start_slot[i] - fix.sol.start_slot[i - 1] == 3);

  auto can = spc::run_strategy(prob, spc::Strategy::can_opt({25, 37.5, 50}));
  REQUIRE(can.feasible);
  for (int i = 1; i < 5; ++i) {
    double gap = can.f_cont[i] - can.f_cont[i - 1];
    CHECK(gap >= 25 - 1e-7);
    CHECK(gap <= 50 + 1e-7);
  }

  auto rnd = spc::run_strategy(prob,
                               spc::Strategy::can_random({25, 37.5, 50}, 3));
  REQUIRE(rnd.feasible);
  for (int i = 1; i < 5; ++i) {
    double gap = rnd.f_cont[i] - rnd.f_cont[i - 1];
    CHECK(gap >= 25 - 1e-7);
    CHECK(gap <= 50 + 1e-7);
  }
  auto rnd2 = spc::run_strategy(prob,
                                spc::Strategy::can_random({25, 37.5, 50}, 3));
  REQUIRE(rnd2.feasible);
  for (int i = 0; i < 5; ++i) CHECK(rnd.f_cont[i] == rnd2.f_cont[i]);

  // Restricting the window can only hurt the objective.
  auto cso = spc::run_strategy(prob, spc::Strategy::cso());
  REQUIRE(cso.feasible);
  CHECK(cso.x_net_lp <= can.x_net_lp * (1 + 1e-7) + 1e-9);
  CHECK(can.x_net_lp <= rnd.x_net_lp * (1 + 1e-7) + 1e-9);
  CHECK(cso.x_net_lp <= fix.x_net_lp * (1 + 1e-7) + 1e-9);
}

TEST_CASE("fixed pitch is infeasible exactly when the packing overflows") {
  std::vector<std::pair<int, int>> placement;
  for (int i = 0; i < 5; ++i) placement.push_back({1 + 2 * i, 2});

  Inst fits = ptp_inst(600, 14, placement, 15, 15.2);
  auto okp = fits.problem();
  auto ok = spc::run_strategy(okp, spc::Strategy::fix(37.5));
  CHECK(ok.feasible);
  CHECK(ok.f_cont.front() == doctest::Approx(12.5).epsilon(1e-7));
  CHECK(ok.f_cont.back() == doctest::Approx(14 * 12.5 - 12.5).epsilon(1e-7));

  Inst tight = ptp_inst(600, 13, placement, 15, 15.2);
  auto bad = spc::run_strategy(tight.problem(), spc::Strategy::fix(37.5));
  CHECK_FALSE(bad.feasible);
}

TEST_CASE("multiple footprints stretch the fixed-pitch window") {
  Inst in = ptp_inst(600, 20, {{1, 4}, {5, 4}, {9, 4}}, 15, 15.2);
  // Widths 4 only, but advertise a second footprint in the catalog.
  in.cat.transceivers.push_back({16, 2});
  in.cat.modes[0].gbps_by_baud[16] = 50.0;
  auto prob = in.problem();
  REQUIRE(prob.n_bandwidths == 2);

  // Exact 25-GHz pitch collides with the 50-GHz footprints, but the window
  // stretches to twice the pitch and settles there.
  auto stretch = spc::run_strategy(prob, spc::Strategy::fix(25));
  REQUIRE(stretch.feasible);
  for (int i = 1; i < 3; ++i)
    CHECK(stretch.f_cont[i] - stretch.f_cont[i - 1] ==
          doctest::Approx(50).epsilon(1e-7));

  Inst narrow = ptp_inst(600, 20, {{1, 4}, {5, 4}, {9, 4}}, 15, 15.2);
  auto np = narrow.problem();
  REQUIRE(np.n_bandwidths == 1);
  auto pinned = spc::run_strategy(np, spc::Strategy::fix(25));
  CHECK_FALSE(pinned.feasible);
}

TEST_CASE("rounding keeps order and clears overlaps") {
  SUBCASE("aligned input is untouched") {
    Inst in = ptp_inst(600, 12, {{1, 2}, {5, 2}, {9, 2}}, 15, 15.2);
    auto prob = in.problem();
    std::vector<double> f = {prob.center_ghz(0), prob.center_ghz(1),
                             prob.center_ghz(2)};
    auto sol = spc::round_to_grid(prob, f);
    CHECK(sol.start_slot == std::vector<int>{1, 5, 9});
    for (int i = 0; i < 3; ++i)
      CHECK(sol.f_ghz[i] == doctest::Approx(f[i]).epsilon(1e-12));
  }
  SUBCASE("collisions push later channels up") {
    Inst in = ptp_inst(600, 10, {{1, 2}, {3, 2}, {5, 2}}, 15, 15.2);
    auto prob = in.problem();
    auto sol = spc::round_to_grid(prob, {31.25, 55.0, 80.6});
    CHECK(sol.start_slot == std::vector<int>{3, 5, 7});
  }
  SUBCASE("band overflow pushes earlier channels down") {
    Inst in = ptp_inst(600, 10, {{1, 2}, {3, 2}}, 15, 15.2);
    auto prob = in.problem();
    auto sol = spc::round_to_grid(prob, {101.25, 118.0});
    CHECK(sol.start_slot == std::vector<int>{7, 9});
  }
  SUBCASE("overfull band cannot be repaired") {
    Inst in = ptp_inst(600, 10, {{1, 4}, {5, 4}}, 15, 15.2);
    auto prob = in.problem();
    // Pretend a third copy of the spectrum exists by shrinking the band.
    prob.w = 7;
    CHECK_THROWS_AS(spc::round_to_grid(prob, {25.0, 62.5}),
                    std::logic_error);
  }
  SUBCASE("order is preserved under repair") {
    Inst in = ptp_inst(600, 20, {{1, 2}, {3, 2}, {5, 2}, {7, 2}}, 15, 15.2);
    auto prob = in.problem();
    auto sol = spc::round_to_grid(prob, {30.1, 55.4, 55.9, 230.0});
    for (int i = 1; i < 4; ++i) {
      CHECK(sol.start_slot[i] >= sol.start_slot[i - 1] + 2);
      CHECK(sol.start_slot[i] + 2 - 1 <= 20);
    }
  }
}

TEST_CASE("exact evaluation tracks interference") {
  Inst in = ptp_inst(600, 40, {{1, 2}, {3, 2}}, 15, 15.2);
  auto prob = in.problem();
  double c0 = prob.center_ghz(0);

  auto close = spc::evaluate_qot(prob, {c0, c0 + 25.0});
  auto far = spc::evaluate_qot(prob, {c0, c0 + 100.0});
  double solo = prob.paths[0].snr_best_db - 15.2;
  CHECK(close[0] < far[0]);
  CHECK(far[0] < solo);

  // Hand-composed reference from the physical primitives.
  double g = in.fib.psd_w_hz;
  double eta = phys::xci_efficiency(25.0, 25.0, in.fib.fp);
  double nli = g * g * g * eta * 6;
  double want = phys::snr_db(g, phys::ase_psd(6, in.fib.fp), nli) - 15.2;
  CHECK(close[0] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("interference counts only the shared part of the route") {
  Inst in = overlap_inst(400, 20, {{1, 0}, {3, 1}}, 25, 10.0);
  auto prob = in.problem();
  REQUIRE(prob.share[0][1] == 1);
  CHECK(prob.shared_spans[0][1] == 4);

  double c0 = prob.center_ghz(0);
  double c1 = prob.center_ghz(1);
  auto qs = spc::evaluate_qot(prob, {c0, c1});

  double g = in.fib.psd_w_hz;
  double eta = phys::xci_efficiency(c1 - c0, 25.0, in.fib.fp);
  double nli = g * g * g * eta * 4;
  double short_snr = phys::snr_db(g, phys::ase_psd(4, in.fib.fp), nli);
  double long_snr = phys::snr_db(g, phys::ase_psd(8, in.fib.fp), nli);
  CHECK(qs[0] == doctest::Approx(short_snr - 10.0).epsilon(1e-9));
  CHECK(qs[1] == doctest::Approx(long_snr - 10.0).epsilon(1e-9));
}

TEST_CASE("neighbor reduction stays faithful at two-bandwidth spacing") {
  SUBCASE("uniform pitch") {
    std::vector<std::pair<int, int>> placement;
    for (int i = 0; i < 5; ++i) placement.push_back({1 + 4 * i, 2});
    Inst in = ptp_inst(600, 40, placement, 15, 15.2);
    auto prob = in.problem();
    std::vector<double> f;
    for (int i = 0; i < 5; ++i) f.push_back(prob.center_ghz(i));
    double lo = spc::reduced_network_x(prob, f, true);
    double hi = spc::reduced_network_x(prob, f, false);
    CHECK(lo <= hi);
    CHECK(std::fabs(db(hi) - db(lo)) <= 0.1);
  }
  SUBCASE("solved placement on a wide band") {
    std::vector<std::pair<int, int>> placement;
    for (int i = 0; i < 6; ++i) placement.push_back({1 + 2 * i, 2});
    Inst in = ptp_inst(600, 60, placement, 15, 15.2);
    auto prob = in.problem();
    auto out = spc::run_strategy(prob, spc::Strategy::cso());
    REQUIRE(out.feasible);
    for (int i = 1; i < 6; ++i)
      REQUIRE(out.f_cont[i] - out.f_cont[i - 1] >= 50.0 - 1e-6);
    double lo = spc::reduced_network_x(prob, out.f_cont, true);
    double hi = spc::reduced_network_x(prob, out.f_cont, false);
    CHECK(std::fabs(db(hi) - db(lo)) <= 0.1);
  }
}

TEST_CASE("spreading lifts the floor on the long-haul reference") {
  std::vector<std::pair<int, int>> placement;
  for (int i = 0; i < 30; ++i) placement.push_back({1 + 2 * i, 2});
  Inst in = ptp_inst(600, 320, placement, 15.03, 15.2);
  auto prob = in.problem();
  CHECK(prob.paths[0].snr_best_db == doctest::Approx(17.9746).epsilon(1e-3));

  auto fix = spc::run_strategy(prob, spc::Strategy::fix(37.5));
  REQUIRE(fix.feasible);
  auto cso = spc::run_strategy(prob, spc::Strategy::cso());
  REQUIRE(cso.feasible);

  auto min_snr = [&](const spc::SpacingSolution& sol) {
    double m = 1e9;
    for (double q : sol.q_db) m = std::min(m, q + 15.2);
    return m;
  };
  double lift = min_snr(cso.sol) - min_snr(fix.sol);
  CHECK(lift >= 0.52);
  CHECK(lift <= 1.12);
  CHECK(cso.x_net_lp <= fix.x_net_lp * (1 + 1e-7));
  for (double q : cso.sol.q_db) CHECK(q > 0.0);
}

TEST_CASE("strategy ordering holds on shared-route meshes") {
  Inst in = overlap_inst(400, 40,
                         {{1, 0}, {3, 1}, {5, 0}, {7, 1}, {9, 0}}, 25, 10.0);
  auto prob = in.problem();
  auto cso = spc::run_strategy(prob, spc::Strategy::cso());
  auto can = spc::run_strategy(prob, spc::Strategy::can_opt({25, 50, 75}));
  auto rnd =
      spc::run_strategy(prob, spc::Strategy::can_random({25, 50, 75}, 11));
  REQUIRE(cso.feasible);
  REQUIRE(can.feasible);
  REQUIRE(rnd.feasible);
  CHECK(cso.x_net_lp <= can.x_net_lp * (1 + 1e-7) + 1e-9);
  CHECK(can.x_net_lp <= rnd.x_net_lp * (1 + 1e-7) + 1e-9);
}

TEST_CASE("problem assembly from the provisioning pipeline") {
  auto net = topo::load_topology(std::string(FON_DATA_DIR) + "/ring4.json");
  auto cat = modes::load_mode_table(std::string(FON_DATA_DIR) +
                                    "/modes_default.json");
  auto fib = phys::load_fiber(std::string(FON_DATA_DIR) +
                              "/fiber_default.json");
  auto pre = pre::precalculate(net, {{0, 1}}, 1, cat, fib, 0.0);
  REQUIRE(!pre.candidates.empty());

  // Two non-overlapping 16-Gbaud placements on the same route.
  thru::ProvisioningState st;
  for (int want : {1, 3}) {
    for (const auto& c : pre.candidates) {
      if (c.gbaud == 16 && c.ch.start_slot == want && st.adopted.size() <
          static_cast<size_t>(want == 1 ? 1 : 2)) {
        st.adopted.push_back(c.id);
        break;
      }
    }
  }
  REQUIRE(st.adopted.size() == 2);
  st.th_gbps = 100.0;

  auto prob = spc::make_problem(pre, net, st, cat, fib, 10);
  REQUIRE(prob.paths.size() == 2);
  CHECK(prob.n_bandwidths == 3);
  CHECK(prob.share[0][1] == 1);
  CHECK(prob.share[1][0] == 1);
  CHECK(prob.shared_spans[0][1] == 4);
  CHECK(prob.fits.count({2, 2}) == 1);
  CHECK(prob.weight(0) < 1.0);
  CHECK(!prob.paths[0].mode_label.empty());

  auto out = spc::run_strategy(prob, spc::Strategy::cso());
  REQUIRE(out.feasible);
  std::ostringstream os;
  spc::write_spacing_csv(prob, out.sol, os);
  std::string text = os.str();
  CHECK(text.find("cand_id,") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
