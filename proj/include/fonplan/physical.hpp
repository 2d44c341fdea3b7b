#pragma once

#include <string>
#include <vector>

#include "fonplan/topology.hpp"

// Physical-layer model: amplifier ASE noise, cross-channel nonlinear
// interference in the incoherent GN approximation, SNR bookkeeping, the
// worst-case spectrum-filling bound, and conservative piecewise-linear fits
// of the XCI efficiency curve.
//
// All computation is in linear SI units (W, Hz, m); dB only at the API
// boundary.  Frequencies are handed around in GHz because the grid is
// defined there; conversions happen inside.

namespace fon::phys {

struct FiberParams {
  double alpha_db = 0.2;     // attenuation, dB/km
  double beta2_abs = 21.7;   // |beta2|, ps^2/km
  double gamma_nl = 1.3;     // nonlinear coefficient, 1/(W km)
  double nsp_db = 5.0;       // amplifier noise figure, dB
  double span_km = 100.0;    // amplifier spacing
  double nu_hz = 192.5e12;   // reference optical frequency
  double planck = 6.62607015e-34;

  void validate() const;  // throws on nonpositive entries
};

struct FiberConfig {
  FiberParams fp;
  double psd_w_hz = 25e-15;  // uniform launch PSD
};

FiberConfig load_fiber(const std::string& path);

// 1 uW/GHz = 1e-15 W/Hz.
constexpr double uw_per_ghz(double v) { return v * 1e-15; }

// Per-span ASE contribution times the span count (Eq.-4 style).
double ase_psd(int n_spans, const FiberParams& fp);  // W/Hz

// Prefactor of the log-form XCI efficiency, (W/Hz)^-2 per span.
double xci_prefactor(const FiberParams& fp);

// Per-span XCI efficiency of an interferer of bandwidth b_ghz whose center
// sits delta_f_ghz away.  Requires delta_f > b/2 (no spectral overlap).
double xci_efficiency(double delta_f_ghz, double b_ghz, const FiberParams& fp);

struct Interferer {
  double delta_f_ghz;   // center-to-center spacing to the victim
  double bandwidth_ghz;
  int shared_spans;     // N_{p,p'}
  double psd_w_hz;
};

// Total NLI PSD seen by a victim of the given launch PSD.
double nli_psd(double victim_psd_w_hz, const std::vector<Interferer>& xs,
               const FiberParams& fp);  // W/Hz

double snr_db(double g_psd_w_hz, double g_ase_w_hz, double g_nli_w_hz);

// Relative NLI strength 10*log10(1 + G_nli/G_ase).
double x_factor_db(double g_ase_w_hz, double g_nli_w_hz);

// Worst-case relative NLI strength for a channel inside [1, w] when every
// remaining slot is packed back-to-back with b_min_slots-wide channels, all
// sharing the victim's full route.  Independent of the span count because
// both NLI and ASE scale with it.
double worst_case_x_db(const topo::Channel& ch, int b_min_slots, int w,
                       double f_grid_ghz, double psd_w_hz,
                       const FiberParams& fp);

struct XciFit {
  int b_victim_slots = 0;
  int b_interferer_slots = 0;
  double f_min_ghz = 0.0;
  double f_max_ghz = 0.0;
  // Efficiency over-approximated by max_q(a[q] * delta_f + b[q]).
  std::vector<double> a, b;
  double max_rel_error = 0.0;  // vs the 1-GHz samples

  double eval(double delta_f_ghz) const;
  int segments() const { return static_cast<int>(a.size()); }
};

// Chord fit over the sampled efficiency curve: conservative everywhere on
// the domain, minimax relative over-error across samples for the given
// segment budget.
XciFit fit_xci_piecewise(int b_victim_slots, int b_interferer_slots,
                         double f_grid_ghz, double f_max_ghz,
                         const FiberParams& fp, int q_segments,
                         double step_ghz = 1.0);

}  // namespace fon::phys
