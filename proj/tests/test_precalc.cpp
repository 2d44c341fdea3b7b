#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fonplan/precalc.hpp"

using namespace fon;
using pre::Candidate;
using pre::Pair;
using pre::Precalc;

namespace {

std::string data_file(const std::string& name) {
  return std::string(FON_DATA_DIR) + "/" + name;
}

modes::Catalog default_catalog() {
  return modes::load_mode_table(data_file("modes_default.json"));
}

// Straight-line network a-b-c-... with identical link lengths.
topo::Network line_net(int n_nodes, double link_km, int w, int w_cur) {
  topo::Network net;
  for (int i = 0; i < n_nodes; ++i)
    net.nodes.push_back(std::string(1, static_cast<char>('a' + i)));
  for (int i = 0; i + 1 < n_nodes; ++i) {
    topo::Link l;
    l.u = i;
    l.v = i + 1;
    l.length_km = link_km;
    l.n_spans = static_cast<int>(std::ceil(link_km / net.span_km - 1e-12));
    net.links.push_back(l);
  }
  net.w = w;
  net.w_cur = w_cur;
  return net;
}

phys::FiberConfig fiber_at(double psd_uw_ghz) {
  phys::FiberConfig cfg;
  cfg.psd_w_hz = phys::uw_per_ghz(psd_uw_ghz);
  return cfg;
}

using CandKey = std::tuple<int, int, int, int, int>;  // route,start,b,baud,mode

std::set<CandKey> keys_of(const Precalc& p) {
  std::set<CandKey> out;
  for (const Candidate& c : p.candidates)
    out.insert({c.route_idx, c.ch.start_slot, c.ch.b_slots, c.gbaud, c.mode_idx});
  return out;
}

int count_mode(const Precalc& p, const modes::Catalog& cat,
               const std::string& mf, const std::string& fec) {
  int n = 0;
  for (const Candidate& c : p.candidates)
    if (cat.modes[c.mode_idx].mf == mf && cat.modes[c.mode_idx].fec == fec) ++n;
  return n;
}

}  // namespace

TEST_CASE("unfiltered enumeration hits the counting bound") {
  topo::Network net = line_net(2, 100.0, 12, 12);
  modes::Catalog cat = default_catalog();
  phys::FiberConfig fib = fiber_at(25.0);
  // One span: interference-free SNR is ~28 dB, above every threshold, and a
  // huge decrement removes all margins, so nothing is filtered.
  Precalc p = pre::precalculate(net, {{0, 1}}, 2, cat, fib, 1e9);

  REQUIRE(p.routes.size() == 1);  // only one simple path exists
  // starts per baud: 11 (2 slots) + 9 (4) + 7 (6) = 27, times 12 modes
  CHECK(p.enumerated == 27 * 12);
  CHECK(p.candidates.size() == 27 * 12);
  CHECK(p.warnings.empty());

  // Every (channel, baud) class leads with its top mode.
  std::set<std::pair<int, int>> classes;
  for (const Candidate& c : p.candidates) {
    if (classes.insert({c.ch.start_slot, c.gbaud}).second) {
      CHECK(cat.modes[c.mode_idx].label() == "256QAM/0.92");
      CHECK(c.capacity_gbps == cat.modes[c.mode_idx].bitrate(c.gbaud));
    }
  }
  CHECK(classes.size() == 27);

  // Ids are dense and ascending.
  for (size_t i = 0; i < p.candidates.size(); ++i)
    CHECK(p.candidates[i].id == static_cast<int>(i));
}

TEST_CASE("margin reservation on the 600 km point-to-point instance") {
  topo::Network net = line_net(2, 600.0, 320, 60);
  modes::Catalog cat = modes::restrict_bauds(default_catalog(), {16});
  phys::FiberConfig fib = fiber_at(15.03);

  SUBCASE("full worst-case margins keep the catalog at 16QAM") {
    Precalc p = pre::precalculate(net, {{0, 1}}, 1, cat, fib, 0.0);
    REQUIRE(!p.candidates.empty());
    CHECK(count_mode(p, cat, "64QAM", "0.68") == 0);
    CHECK(count_mode(p, cat, "64QAM", "0.78") == 0);
    // All 59 channel positions still clear the best 16QAM row.
    CHECK(count_mode(p, cat, "16QAM", "0.92") == 59);

    // Worst-case penalties over the full 320-slot band, from the edge and
    // the band-center side of the lit region.
    double x_lo = 1e9, x_hi = -1e9;
    for (const Candidate& c : p.candidates) {
      x_lo = std::min(x_lo, c.x_worst_db);
      x_hi = std::max(x_hi, c.x_worst_db);
      CHECK(c.snr_best_db == doctest::Approx(17.9746).epsilon(1e-4));
    }
    CHECK(x_lo == doctest::Approx(1.4485).epsilon(1e-3));
    CHECK(x_hi == doctest::Approx(2.2073).epsilon(1e-3));
    CHECK(p.max_x_worst_db == doctest::Approx(2.2073).epsilon(1e-3));
  }

  SUBCASE("one decibel of melt admits 64QAM everywhere, but only the entry row") {
    Precalc p = pre::precalculate(net, {{0, 1}}, 1, cat, fib, 1.0);
    CHECK(count_mode(p, cat, "64QAM", "0.68") == 59);
    CHECK(count_mode(p, cat, "64QAM", "0.78") == 0);
  }

  SUBCASE("half a decibel admits 64QAM only near the band edge") {
    Precalc p = pre::precalculate(net, {{0, 1}}, 1, cat, fib, 0.5);
    int n = count_mode(p, cat, "64QAM", "0.68");
    CHECK(n > 0);
    CHECK(n < 59);
  }

  SUBCASE("melting the margin only ever adds candidates") {
    std::set<CandKey> prev;
    for (double dec : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0}) {
      Precalc p = pre::precalculate(net, {{0, 1}}, 1, cat, fib, dec);
      std::set<CandKey> cur = keys_of(p);
      for (const CandKey& k : prev) CHECK(cur.count(k) == 1);
      prev = cur;
    }
  }

  SUBCASE("infinite margin empties the candidate set with a warning") {
    Precalc p = pre::precalculate(net, {{0, 1}}, 1, cat, fib, -1e12);
    CHECK(p.candidates.empty());
    REQUIRE(p.warnings.size() == 1);
    CHECK(p.warnings[0].find("no mode fits") != std::string::npos);
  }
}

TEST_CASE("candidate fields are internally consistent") {
  topo::Network net = topo::load_topology(data_file("ring4.json"));
  modes::Catalog cat = default_catalog();
  phys::FiberConfig fib = fiber_at(25.0);
  Precalc p = pre::precalculate(net, {{0, 1}, {0, 2}}, 2, cat, fib, 3.0);
  REQUIRE(!p.candidates.empty());

  int b_min = 2;
  for (const Candidate& c : p.candidates) {
    const topo::Route& r = p.routes.at(c.route_idx);
    CHECK(c.ch.start_slot >= 1);
    CHECK(c.ch.end_slot() <= net.w_cur);
    CHECK(c.ch.b_slots == cat.slots_for(c.gbaud));
    CHECK(c.capacity_gbps == cat.modes.at(c.mode_idx).bitrate(c.gbaud));
    CHECK(c.capacity_gbps > 0.0);
    CHECK(c.snr_best_db ==
          doctest::Approx(phys::snr_db(fib.psd_w_hz,
                                       phys::ase_psd(r.n_spans, fib.fp), 0.0))
              .epsilon(1e-12));
    CHECK(c.x_worst_db ==
          doctest::Approx(phys::worst_case_x_db(c.ch, b_min, net.w,
                                                net.f_grid_ghz, fib.psd_w_hz,
                                                fib.fp))
              .epsilon(1e-12));
    // The margin test it passed, restated.
    double margin = std::max(0.0, c.x_worst_db - 3.0);
    CHECK(cat.modes.at(c.mode_idx).snr_threshold_db <= c.snr_best_db - margin);
  }

  // Ring worst case on the 60-slot band, dense 2-slot fill.
  CHECK(p.max_x_worst_db == doctest::Approx(4.982).epsilon(4e-3));

  // Both routes of the adjacent pair appear: the direct link and the long
  // way around.
  REQUIRE(p.routes.size() >= 2);
  CHECK(p.routes[0].link_ids.size() == 1);
  CHECK(p.routes[1].link_ids.size() == 3);
}

TEST_CASE("unreachable pairs are flagged and skipped") {
  topo::Network net = line_net(3, 100.0, 12, 12);
  net.links.pop_back();  // disconnect c
  modes::Catalog cat = default_catalog();
  Precalc p = pre::precalculate(net, {{0, 1}, {0, 2}}, 2, cat, fiber_at(25.0), 1e9);
  REQUIRE(p.warnings.size() == 1);
  CHECK(p.warnings[0].find("a -> c") != std::string::npos);
  CHECK(p.warnings[0].find("unreachable") != std::string::npos);
  CHECK(!p.candidates.empty());
  for (const Candidate& c : p.candidates)
    CHECK(p.routes.at(c.route_idx).d == 1);
}

TEST_CASE("channel stride thins the start positions") {
  topo::Network net = line_net(2, 100.0, 24, 24);
  modes::Catalog cat = modes::restrict_bauds(default_catalog(), {16});
  Precalc full = pre::precalculate(net, {{0, 1}}, 1, cat, fiber_at(25.0), 1e9, 1);
  Precalc half = pre::precalculate(net, {{0, 1}}, 1, cat, fiber_at(25.0), 1e9, 2);
  CHECK(full.candidates.size() == 23u * 12u);
  CHECK(half.candidates.size() == 12u * 12u);  // starts 1,3,...,23
  for (const Candidate& c : half.candidates)
    CHECK((c.ch.start_slot - 1) % 2 == 0);
  std::set<CandKey> sup = keys_of(full), sub = keys_of(half);
  for (const CandKey& k : sub) CHECK(sup.count(k) == 1);
}

TEST_CASE("precalculation is deterministic") {
  topo::Network net = topo::load_topology(data_file("ring4.json"));
  modes::Catalog cat = default_catalog();
  Precalc a = pre::precalculate(net, {{0, 2}, {1, 3}}, 2, cat, fiber_at(25.0), 2.0);
  Precalc b = pre::precalculate(net, {{0, 2}, {1, 3}}, 2, cat, fiber_at(25.0), 2.0);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (size_t i = 0; i < a.candidates.size(); ++i) {
    CHECK(a.candidates[i].id == b.candidates[i].id);
    CHECK(a.candidates[i].route_idx == b.candidates[i].route_idx);
    CHECK(a.candidates[i].ch.start_slot == b.candidates[i].ch.start_slot);
    CHECK(a.candidates[i].mode_idx == b.candidates[i].mode_idx);
    CHECK(a.candidates[i].gbaud == b.candidates[i].gbaud);
    CHECK(a.candidates[i].capacity_gbps == b.candidates[i].capacity_gbps);
  }
}

TEST_CASE("candidate dump emits one labeled row per candidate") {
  topo::Network net = line_net(2, 200.0, 8, 8);
  modes::Catalog cat = modes::restrict_bauds(default_catalog(), {32});
  Precalc p = pre::precalculate(net, {{0, 1}}, 1, cat, fiber_at(25.0), 1e9);
  REQUIRE(!p.candidates.empty());

  std::ostringstream os;
  pre::dump_candidates(p, net, cat, os);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line ==
        "id,s,d,k,start_slot,b_slots,gbaud,mf,fec,capacity_gbps,snr_best_db,"
        "x_worst_db");
  size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(line.find(",a,b,") != std::string::npos);
    CHECK(line.find(",32,") != std::string::npos);
  }
  CHECK(rows == p.candidates.size());
}

TEST_CASE("precalculation input validation") {
  topo::Network net = line_net(2, 100.0, 12, 12);
  modes::Catalog cat = default_catalog();
  phys::FiberConfig fib = fiber_at(25.0);
  CHECK_THROWS_AS((void)pre::precalculate(net, {}, 1, cat, fib, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pre::precalculate(net, {{0, 1}}, 0, cat, fib, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pre::precalculate(net, {{0, 1}}, 1, cat, fib, 0.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pre::precalculate(net, {{0, 0}}, 1, cat, fib, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pre::precalculate(net, {{0, 7}}, 1, cat, fib, 0.0),
                  std::invalid_argument);
}
