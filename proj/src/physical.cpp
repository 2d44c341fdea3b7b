#include "fonplan/physical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fon::phys {

void FiberParams::validate() const {
  if (alpha_db <= 0 || beta2_abs <= 0 || gamma_nl <= 0 || span_km <= 0 ||
      nu_hz <= 0 || planck <= 0)
    throw std::invalid_argument("fiber parameters must be positive");
}

FiberConfig load_fiber(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open fiber file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("fiber parse error in " + path + ": " + e.what());
  }
  FiberConfig cfg;
  cfg.fp.alpha_db = j.value("alpha_db_per_km", cfg.fp.alpha_db);
  cfg.fp.beta2_abs = j.value("beta2_ps2_per_km", cfg.fp.beta2_abs);
  cfg.fp.gamma_nl = j.value("gamma_per_w_km", cfg.fp.gamma_nl);
  cfg.fp.nsp_db = j.value("nsp_db", cfg.fp.nsp_db);
  cfg.fp.span_km = j.value("span_km", cfg.fp.span_km);
  if (j.contains("nu_thz")) cfg.fp.nu_hz = j["nu_thz"].get<double>() * 1e12;
  if (j.contains("psd_uw_per_ghz"))
    cfg.psd_w_hz = uw_per_ghz(j["psd_uw_per_ghz"].get<double>());
  cfg.fp.validate();
  if (cfg.psd_w_hz <= 0)
    throw std::runtime_error("fiber config: psd must be positive");
  return cfg;
}

double ase_psd(int n_spans, const FiberParams& fp) {
  if (n_spans < 0) throw std::invalid_argument("ase_psd: negative span count");
  double gain = std::pow(10.0, fp.alpha_db * fp.span_km / 10.0);
  double nsp = std::pow(10.0, fp.nsp_db / 10.0);
  return n_spans * (gain - 1.0) * nsp * fp.planck * fp.nu_hz;
}

double xci_prefactor(const FiberParams& fp) {
  double gamma_si = fp.gamma_nl * 1e-3;                      // 1/(W m)
  double alpha_lin = fp.alpha_db * std::log(10.0) / 10.0 * 1e-3;  // 1/m
  double beta2_si = fp.beta2_abs * 1e-27;                    // s^2/m
  return 3.0 * gamma_si * gamma_si /
         (2.0 * M_PI * alpha_lin * beta2_si);
}

double xci_efficiency(double delta_f_ghz, double b_ghz, const FiberParams& fp) {
  if (delta_f_ghz <= b_ghz / 2.0)
    throw std::invalid_argument("xci_efficiency: channels overlap");
  double ratio = (delta_f_ghz + b_ghz / 2.0) / (delta_f_ghz - b_ghz / 2.0);
  return xci_prefactor(fp) * std::log(ratio);
}

double nli_psd(double victim_psd_w_hz, const std::vector<Interferer>& xs,
               const FiberParams& fp) {
  double total = 0.0;
  for (const Interferer& x : xs) {
    double eta = xci_efficiency(x.delta_f_ghz, x.bandwidth_ghz, fp);
    total += eta * x.shared_spans * x.psd_w_hz * x.psd_w_hz;
  }
  return victim_psd_w_hz * total;
}

double snr_db(double g_psd_w_hz, double g_ase_w_hz, double g_nli_w_hz) {
  if (g_psd_w_hz <= 0 || g_ase_w_hz <= 0 || g_nli_w_hz < 0)
    throw std::invalid_argument("snr_db: nonpositive input");
  return 10.0 * std::log10(g_psd_w_hz / g_ase_w_hz) -
         10.0 * std::log10(1.0 + g_nli_w_hz / g_ase_w_hz);
}

double x_factor_db(double g_ase_w_hz, double g_nli_w_hz) {
  return 10.0 * std::log10(1.0 + g_nli_w_hz / g_ase_w_hz);
}

double worst_case_x_db(const topo::Channel& ch, int b_min_slots, int w,
                       double f_grid_ghz, double psd_w_hz,
                       const FiberParams& fp) {
  if (ch.start_slot < 1 || ch.end_slot() > w)
    throw std::invalid_argument("worst_case_x_db: channel outside band");
  const double bw_int = b_min_slots * f_grid_ghz;
  double eta_sum = 0.0;
  // Fill each side outward from the victim with back-to-back channels;
  // slots left over at the band edge cannot host a full channel.
  const int left_blocks = (ch.start_slot - 1) / b_min_slots;
  const int right_blocks = (w - ch.end_slot()) / b_min_slots;
  const double half_victim = 0.5 * ch.b_slots * f_grid_ghz;
  for (int k = 1; k <= left_blocks; ++k) {
    double df = half_victim + (k - 0.5) * bw_int;
    eta_sum += xci_efficiency(df, bw_int, fp);
  }
  for (int k = 1; k <= right_blocks; ++k) {
    double df = half_victim + (k - 0.5) * bw_int;
    eta_sum += xci_efficiency(df, bw_int, fp);
  }
  // Span counts cancel between NLI and ASE.
  double ratio = psd_w_hz * psd_w_hz * psd_w_hz * eta_sum / ase_psd(1, fp);
  return 10.0 * std::log10(1.0 + ratio);
}

double XciFit::eval(double delta_f_ghz) const {
  double best = -1e300;
  for (std::size_t q = 0; q < a.size(); ++q)
    best = std::max(best, a[q] * delta_f_ghz + b[q]);
  return best;
}

namespace {

// Worst relative over-error of the chord spanning samples [i, j].
double chord_error(const std::vector<double>& fs, const std::vector<double>& ys,
                   int i, int j) {
  double a = (ys[j] - ys[i]) / (fs[j] - fs[i]);
  double b = ys[i] - a * fs[i];
  double worst = 0.0;
  for (int k = i + 1; k < j; ++k) {
    double over = (a * fs[k] + b - ys[k]) / ys[k];
    if (over > worst) worst = over;
  }
  return worst;
}

// Farthest sample reachable from i with chord error <= eps.  Chord error is
// nondecreasing in the right endpoint on a convex curve, so binary search.
int farthest(const std::vector<double>& fs, const std::vector<double>& ys,
             int i, double eps) {
  int lo = i + 1, hi = static_cast<int>(fs.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (chord_error(fs, ys, i, mid) <= eps) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

// Number of chords needed to cover all samples at tolerance eps, capped.
int segments_needed(const std::vector<double>& fs, const std::vector<double>& ys,
                    double eps, int cap) {
  int i = 0, used = 0;
  const int last = static_cast<int>(fs.size()) - 1;
  while (i < last) {
    i = farthest(fs, ys, i, eps);
    if (++used > cap) return used;
  }
  return used;
}

}  // namespace

XciFit fit_xci_piecewise(int b_victim_slots, int b_interferer_slots,
                         double f_grid_ghz, double f_max_ghz,
                         const FiberParams& fp, int q_segments,
                         double step_ghz) {
  if (q_segments < 1) throw std::invalid_argument("fit: q_segments < 1");
  const double f_min = 0.5 * (b_victim_slots + b_interferer_slots) * f_grid_ghz;
  if (f_max_ghz <= f_min)
    throw std::invalid_argument("fit: domain empty (f_max below closest spacing)");
  const double bw = b_interferer_slots * f_grid_ghz;

  std::vector<double> fs, ys;
  for (double f = f_min; f < f_max_ghz - 1e-9; f += step_ghz) fs.push_back(f);
  fs.push_back(f_max_ghz);
  if (static_cast<int>(fs.size()) < 2)
    throw std::invalid_argument("fit: fewer than two samples");
  if (q_segments > static_cast<int>(fs.size()) - 1)
    throw std::invalid_argument("fit: more segments than sample gaps");
  ys.reserve(fs.size());
  for (double f : fs) ys.push_back(xci_efficiency(f, bw, fp));

  // Minimax over-error for the segment budget via bisection on eps.
  double lo = 0.0, hi = chord_error(fs, ys, 0, static_cast<int>(fs.size()) - 1);
  for (int it = 0; it < 60 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (segments_needed(fs, ys, mid, q_segments) <= q_segments) hi = mid;
    else lo = mid;
  }

  XciFit fit;
  fit.b_victim_slots = b_victim_slots;
  fit.b_interferer_slots = b_interferer_slots;
  fit.f_min_ghz = f_min;
  fit.f_max_ghz = f_max_ghz;
  int i = 0;
  const int last = static_cast<int>(fs.size()) - 1;
  double achieved = 0.0;
  while (i < last) {
    int j = farthest(fs, ys, i, hi);
    double a = (ys[j] - ys[i]) / (fs[j] - fs[i]);
    fit.a.push_back(a);
    fit.b.push_back(ys[i] - a * fs[i]);
    achieved = std::max(achieved, chord_error(fs, ys, i, j));
    i = j;
  }
  fit.max_rel_error = achieved;
  return fit;
}

}  // namespace fon::phys
