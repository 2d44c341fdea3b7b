#include "fonplan/precalc.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

namespace fon::pre {

Precalc precalculate(const topo::Network& net, const std::vector<Pair>& pairs,
                     int k_routes, const modes::Catalog& cat,
                     const phys::FiberConfig& fib, double margin_decrement_db,
                     int channel_stride) {
  if (k_routes < 1) throw std::invalid_argument("precalculate: k_routes < 1");
  if (channel_stride < 1)
    throw std::invalid_argument("precalculate: channel_stride < 1");
  if (pairs.empty()) throw std::invalid_argument("precalculate: no demand pairs");
  if (cat.transceivers.empty())
    throw std::invalid_argument("precalculate: empty catalog");
  for (const Pair& pr : pairs) {
    if (pr.s < 0 || pr.d < 0 || pr.s >= static_cast<int>(net.nodes.size()) ||
        pr.d >= static_cast<int>(net.nodes.size()) || pr.s == pr.d)
      throw std::invalid_argument("precalculate: bad demand pair");
  }

  int b_min = cat.transceivers.front().b_slots;
  for (const modes::Transceiver& t : cat.transceivers)
    b_min = std::min(b_min, t.b_slots);

  Precalc out;
  // The penalty bound depends only on the channel geometry, not the route.
  std::map<std::pair<int, int>, double> x_cache;
  auto x_worst = [&](const topo::Channel& ch) {
    auto key = std::make_pair(ch.start_slot, ch.b_slots);
    auto it = x_cache.find(key);
    if (it != x_cache.end()) return it->second;
    double x = phys::worst_case_x_db(ch, b_min, net.w, net.f_grid_ghz,
                                     fib.psd_w_hz, fib.fp);
    out.max_x_worst_db = std::max(out.max_x_worst_db, x);
    x_cache.emplace(key, x);
    return x;
  };

  int next_id = 0;
  for (const Pair& pr : pairs) {
    std::vector<topo::Route> routes = topo::k_shortest_paths(net, pr.s, pr.d, k_routes);
    bool any = false;
    for (topo::Route& r : routes) {
      const int route_idx = static_cast<int>(out.routes.size());
      const double snr_best =
          phys::snr_db(fib.psd_w_hz, phys::ase_psd(r.n_spans, fib.fp), 0.0);
      out.routes.push_back(std::move(r));
      for (const modes::Transceiver& t : cat.transceivers) {
        for (const topo::Channel& ch :
             topo::enumerate_channels(t.b_slots, net.w_cur)) {
          if ((ch.start_slot - 1) % channel_stride != 0) continue;
          out.enumerated += static_cast<long long>(cat.modes.size());
          const double margin =
              std::max(0.0, x_worst(ch) - margin_decrement_db);
          const double budget = snr_best - margin;
          for (int m : modes::feasible_modes(budget, cat, t.r_gbaud)) {
            Candidate c;
            c.id = next_id++;
            c.route_idx = route_idx;
            c.ch = ch;
            c.mode_idx = m;
            c.gbaud = t.r_gbaud;
            c.capacity_gbps = cat.modes[m].bitrate(t.r_gbaud);
            c.snr_best_db = snr_best;
            c.x_worst_db = x_worst(ch);
            out.candidates.push_back(c);
            any = true;
          }
        }
      }
    }
    if (!any)
      out.warnings.push_back("no candidate lightpath for pair " +
                             net.nodes.at(pr.s) + " -> " + net.nodes.at(pr.d) +
                             (routes.empty() ? " (unreachable)" : " (no mode fits)"));
  }
  return out;
}

void dump_candidates(const Precalc& pre, const topo::Network& net,
                     const modes::Catalog& cat, std::ostream& os) {
  os << "id,s,d,k,start_slot,b_slots,gbaud,mf,fec,capacity_gbps,"
        "snr_best_db,x_worst_db\n";
  for (const Candidate& c : pre.candidates) {
    const topo::Route& r = pre.routes.at(c.route_idx);
    const modes::Mode& m = cat.modes.at(c.mode_idx);
    os << c.id << ',' << net.nodes.at(r.s) << ',' << net.nodes.at(r.d) << ','
       << r.k << ',' << c.ch.start_slot << ',' << c.ch.b_slots << ','
       << c.gbaud << ',' << m.mf << ',' << m.fec << ',' << c.capacity_gbps
       << ',' << c.snr_best_db << ',' << c.x_worst_db << '\n';
  }
}

}  // namespace fon::pre
