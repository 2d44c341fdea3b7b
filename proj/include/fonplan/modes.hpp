#pragma once

#include <map>
#include <string>
#include <vector>

// Transceiver and transmission-mode catalog.  A transceiver is a symbol rate
// plus the slot footprint it occupies; a transmission mode is a modulation
// format and FEC overhead with one SNR threshold (baud-independent) and a
// table-driven bitrate per baud-rate.

namespace fon::modes {

struct Transceiver {
  int r_gbaud = 0;  // symbol rate
  int b_slots = 0;  // contiguous frequency slots occupied
};

struct Mode {
  std::string mf;
  std::string fec;
  double snr_threshold_db = 0.0;
  std::map<int, double> gbps_by_baud;

  double bitrate(int gbaud) const;  // throws if the baud is not tabulated
  std::string label() const { return mf + "/" + fec; }
};

struct Catalog {
  std::vector<Transceiver> transceivers;  // ascending baud
  std::vector<Mode> modes;                // ascending SNR threshold
  double f_grid_ghz = 12.5;

  const Transceiver& transceiver(int gbaud) const;  // throws if unknown
  int slots_for(int gbaud) const { return transceiver(gbaud).b_slots; }
  // bitrate / occupied bandwidth, bps/Hz
  double spectral_efficiency(int mode_idx, int gbaud) const;
};

// Load and validate a catalog.  Enforced: footprint bandwidth covers the
// symbol rate; every mode tabulates every transceiver baud; bitrates are
// positive multiples of 12.5 Gbps; for each baud, thresholds strictly
// increase with bitrate.
Catalog load_mode_table(const std::string& path, double f_grid_ghz = 12.5);

// Indices of all modes usable within the SNR budget (threshold <= budget,
// boundary inclusive), sorted by bitrate at the given baud, descending.
std::vector<int> feasible_modes(double snr_budget_db, const Catalog& cat,
                                int gbaud);

// Copy of the catalog keeping only the listed baud-rates (mode rows keep
// their full bitrate tables).  Throws if a requested baud is absent.
Catalog restrict_bauds(const Catalog& cat, const std::vector<int>& gbauds);

}  // namespace fon::modes
