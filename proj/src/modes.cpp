#include "fonplan/modes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace fon::modes {

double Mode::bitrate(int gbaud) const {
  auto it = gbps_by_baud.find(gbaud);
  if (it == gbps_by_baud.end())
    throw std::invalid_argument("mode " + label() + ": no bitrate for " +
                                std::to_string(gbaud) + " Gbaud");
  return it->second;
}

const Transceiver& Catalog::transceiver(int gbaud) const {
  for (const Transceiver& t : transceivers)
    if (t.r_gbaud == gbaud) return t;
  throw std::invalid_argument("unknown baud-rate: " + std::to_string(gbaud));
}

double Catalog::spectral_efficiency(int mode_idx, int gbaud) const {
  const Mode& m = modes.at(mode_idx);
  return m.bitrate(gbaud) / (slots_for(gbaud) * f_grid_ghz);
}

namespace {

bool multiple_of(double v, double step) {
  double q = v / step;
  return std::abs(q - std::round(q)) < 1e-9;
}

}  // namespace

Catalog load_mode_table(const std::string& path, double f_grid_ghz) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open mode table: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("mode table parse error in " + path + ": " + e.what());
  }
  if (f_grid_ghz <= 0) throw std::invalid_argument("mode table: f_grid must be positive");

  Catalog cat;
  cat.f_grid_ghz = f_grid_ghz;

  if (!j.contains("transceivers") || !j["transceivers"].is_array() ||
      j["transceivers"].empty())
    throw std::runtime_error("mode table: missing transceivers");
  for (const auto& tj : j["transceivers"]) {
    Transceiver t;
    t.r_gbaud = tj.at("gbaud").get<int>();
    t.b_slots = tj.at("slots").get<int>();
    if (t.r_gbaud <= 0 || t.b_slots <= 0)
      throw std::runtime_error("mode table: nonpositive transceiver entry");
    // The slot footprint must provide at least the symbol rate of bandwidth.
    if (t.b_slots * f_grid_ghz < t.r_gbaud)
      throw std::runtime_error("mode table: " + std::to_string(t.r_gbaud) +
                               " Gbaud does not fit in " +
                               std::to_string(t.b_slots) + " slots");
    for (const Transceiver& other : cat.transceivers)
      if (other.r_gbaud == t.r_gbaud)
        throw std::runtime_error("mode table: duplicate baud-rate");
    cat.transceivers.push_back(t);
  }
  std::sort(cat.transceivers.begin(), cat.transceivers.end(),
            [](const Transceiver& a, const Transceiver& b) {
              return a.r_gbaud < b.r_gbaud;
            });

  if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].empty())
    throw std::runtime_error("mode table: missing modes");
  std::set<std::string> seen;
  for (const auto& mj : j["modes"]) {
    Mode m;
    m.mf = mj.at("mf").get<std::string>();
    m.fec = mj.at("fec").get<std::string>();
    m.snr_threshold_db = mj.at("snr_threshold_db").get<double>();
    if (!seen.insert(m.label()).second)
      throw std::runtime_error("mode table: duplicate mode " + m.label());
    for (const auto& [key, val] : mj.at("gbps").items()) {
      int gbaud = std::stoi(key);
      double gbps = val.get<double>();
      if (gbps <= 0 || !multiple_of(gbps, 12.5) || gbps < 50.0 || gbps > 750.0)
        throw std::runtime_error("mode table: " + m.label() + " bitrate " +
                                 std::to_string(gbps) +
                                 " outside the 12.5-step [50, 750] Gbps range");
      bool known = false;
      for (const Transceiver& t : cat.transceivers) known |= t.r_gbaud == gbaud;
      if (!known)
        throw std::runtime_error("mode table: " + m.label() +
                                 " references unknown baud " + key);
      m.gbps_by_baud[gbaud] = gbps;
    }
    for (const Transceiver& t : cat.transceivers)
      if (!m.gbps_by_baud.count(t.r_gbaud))
        throw std::runtime_error("mode table: " + m.label() + " missing " +
                                 std::to_string(t.r_gbaud) + " Gbaud bitrate");
    cat.modes.push_back(m);
  }
  std::sort(cat.modes.begin(), cat.modes.end(), [](const Mode& a, const Mode& b) {
    return a.snr_threshold_db < b.snr_threshold_db;
  });

  // A costlier threshold must buy a strictly higher bitrate at every baud.
  for (std::size_t i = 1; i < cat.modes.size(); ++i) {
    const Mode& lo = cat.modes[i - 1];
    const Mode& hi = cat.modes[i];
    if (!(hi.snr_threshold_db > lo.snr_threshold_db))
      throw std::runtime_error("mode table: thresholds not strictly increasing (" +
                               lo.label() + " vs " + hi.label() + ")");
    for (const Transceiver& t : cat.transceivers)
      if (!(hi.bitrate(t.r_gbaud) > lo.bitrate(t.r_gbaud)))
        throw std::runtime_error("mode table: bitrate not increasing with "
                                 "threshold at " + std::to_string(t.r_gbaud) +
                                 " Gbaud (" + lo.label() + " vs " + hi.label() + ")");
  }
  return cat;
}

Catalog restrict_bauds(const Catalog& cat, const std::vector<int>& gbauds) {
  if (gbauds.empty())
    throw std::invalid_argument("restrict_bauds: empty baud list");
  Catalog out = cat;
  out.transceivers.clear();
  for (int g : gbauds) out.transceivers.push_back(cat.transceiver(g));
  std::sort(out.transceivers.begin(), out.transceivers.end(),
            [](const Transceiver& a, const Transceiver& b) {
              return a.r_gbaud < b.r_gbaud;
            });
  for (std::size_t i = 1; i < out.transceivers.size(); ++i)
    if (out.transceivers[i].r_gbaud == out.transceivers[i - 1].r_gbaud)
      throw std::invalid_argument("restrict_bauds: duplicate baud requested");
  return out;
}

std::vector<int> feasible_modes(double snr_budget_db, const Catalog& cat,
                                int gbaud) {
  (void)cat.transceiver(gbaud);
  std::vector<int> out;
  for (std::size_t i = 0; i < cat.modes.size(); ++i)
    if (cat.modes[i].snr_threshold_db <= snr_budget_db)
      out.push_back(static_cast<int>(i));
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return cat.modes[a].bitrate(gbaud) > cat.modes[b].bitrate(gbaud);
  });
  return out;
}

}  // namespace fon::modes
