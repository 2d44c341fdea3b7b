#include "fonplan/optim.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "fonplan/kernels.hpp"

namespace fon::optim {

int LinearModel::add_var(const std::string& vname, double lo, double up,
                         VarKind kind, double obj) {
  if (vname.empty()) throw std::invalid_argument("variable name empty");
  if (!(lo > -kInf)) throw std::invalid_argument("lower bound must be finite: " + vname);
  if (lo > up) throw std::invalid_argument("lower bound above upper: " + vname);
  vars.push_back({vname, lo, up, kind, obj});
  return static_cast<int>(vars.size()) - 1;
}

int LinearModel::add_constraint(const std::string& cname, std::vector<Term> terms,
                                Rel rel, double rhs) {
  Constraint c;
  c.name = cname.empty() ? "c" + std::to_string(cons.size()) : cname;
  c.terms = std::move(terms);
  c.rel = rel;
  c.rhs = rhs;
  for (const Term& t : c.terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars.size()))
      throw std::invalid_argument("constraint references unknown variable");
  }
  cons.push_back(std::move(c));
  return static_cast<int>(cons.size()) - 1;
}

int LinearModel::num_binaries() const {
  int k = 0;
  for (const Var& v : vars)
    if (v.kind == VarKind::Binary) ++k;
  return k;
}

double LinearModel::activity(int c, const std::vector<double>& x) const {
  double a = 0.0;
  for (const Term& t : cons[c].terms) a += t.coef * x[t.var];
  return a;
}

double LinearModel::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    double rel = 1.0 + std::fabs(x[j]);
    worst = std::max(worst, (vars[j].lo - x[j]) / rel);
    if (vars[j].up < kInf) worst = std::max(worst, (x[j] - vars[j].up) / rel);
  }
  for (std::size_t i = 0; i < cons.size(); ++i) {
    double a = activity(static_cast<int>(i), x);
    double rel = 1.0 + std::fabs(cons[i].rhs);
    switch (cons[i].rel) {
      case Rel::Le: worst = std::max(worst, (a - cons[i].rhs) / rel); break;
      case Rel::Ge: worst = std::max(worst, (cons[i].rhs - a) / rel); break;
      case Rel::Eq: worst = std::max(worst, std::fabs(a - cons[i].rhs) / rel); break;
    }
  }
  return worst;
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapFeasible: return "gap_feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
  }
  return "?";
}

namespace {

using fon::kern::axpy;
using fon::kern::scale;

constexpr double kTolPiv = 1e-9;
constexpr double kTolCost = 1e-9;
constexpr double kTolRatio = 1e-9;
constexpr double kTolFeas = 1e-7;
constexpr double kTolInt = 1e-6;

enum : std::uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

// Model flattened to min-sense dense arrays, shared by every node solve.
struct Prepared {
  int n = 0;       // structural variables
  int m = 0;       // rows
  int nslack = 0;  // one per inequality row
  int ncol = 0;    // n + nslack + m artificials
  std::vector<double> a;  // m x n row-major
  std::vector<double> b;
  std::vector<Rel> rel;
  std::vector<double> c;  // min sense
  std::vector<double> lo, up;
  std::vector<std::uint8_t> isint;
  std::vector<int> slack_col;  // per row, -1 for equalities
  bool maximize = false;

  // Rows of the form sum(coef_j * binary_j) <= rhs with all coef_j > 0,
  // used for bound propagation during branching.
  struct Pack {
    std::vector<Term> terms;
    double rhs;
  };
  std::vector<Pack> packs;
  std::vector<std::vector<int>> packs_of;  // var -> pack indices
};

struct LpOut {
  SolveStatus status = SolveStatus::Infeasible;
  double obj = 0.0;          // min sense
  std::vector<double> x;     // structurals
  std::vector<double> y;     // row duals, min sense
  std::vector<double> rc;    // structural reduced costs, min sense
  std::int64_t iters = 0;
};

// Scratch buffers reused across the many LP solves of a tree search.
struct Workspace {
  std::vector<double> tab;   // m x ncol
  std::vector<double> xb;    // basic values per row
  std::vector<double> d1, d2;
  std::vector<double> lob, upb;
  std::vector<double> val;
  std::vector<int> basis;
  std::vector<std::uint8_t> stat;
  std::vector<double> rowsign;
  std::vector<std::uint8_t> art_used;
};

Prepared prepare(const LinearModel& m) {
  Prepared p;
  p.n = static_cast<int>(m.vars.size());
  p.m = static_cast<int>(m.cons.size());
  p.maximize = (m.sense == Sense::Maximize);
  p.a.assign(static_cast<std::size_t>(p.m) * p.n, 0.0);
  p.b.resize(p.m);
  p.rel.resize(p.m);
  p.c.resize(p.n);
  p.lo.resize(p.n);
  p.up.resize(p.n);
  p.isint.resize(p.n);
  p.slack_col.assign(p.m, -1);
  p.packs_of.resize(p.n);

  for (int j = 0; j < p.n; ++j) {
    const auto& v = m.vars[j];
    p.c[j] = p.maximize ? -v.obj : v.obj;
    p.lo[j] = v.lo;
    p.up[j] = v.up;
    p.isint[j] = (v.kind == VarKind::Binary) ? 1 : 0;
  }
  int nslack = 0;
  for (int i = 0; i < p.m; ++i) {
    const auto& con = m.cons[i];
    p.b[i] = con.rhs;
    p.rel[i] = con.rel;
    double* row = &p.a[static_cast<std::size_t>(i) * p.n];
    for (const Term& t : con.terms) row[t.var] += t.coef;
    if (con.rel != Rel::Eq) p.slack_col[i] = p.n + nslack++;

    // Collect packing rows for propagation.
    if (con.rel == Rel::Le) {
      bool pack = !con.terms.empty();
      for (const Term& t : con.terms)
        if (t.coef <= 0.0 || !p.isint[t.var]) { pack = false; break; }
      if (pack) {
        int pi = static_cast<int>(p.packs.size());
        p.packs.push_back({con.terms, con.rhs});
        for (const Term& t : con.terms) p.packs_of[t.var].push_back(pi);
      }
    }
  }
  p.nslack = nslack;
  p.ncol = p.n + p.nslack + p.m;
  return p;
}

// Bounded-variable primal simplex on the prepared arrays with the given
// variable bounds.  Two phases; duals are read off the artificial columns,
// which stay in the tableau with [0,0] bounds once phase 1 is done.
LpOut lp_run(const Prepared& P, const std::vector<double>& lo_in,
             const std::vector<double>& up_in, Workspace& w) {
  LpOut out;
  const int n = P.n, m = P.m, ncol = P.ncol;
  const int art0 = P.n + P.nslack;

  for (int j = 0; j < n; ++j) {
    if (lo_in[j] > up_in[j] + 1e-12) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
  }

  w.tab.assign(static_cast<std::size_t>(m) * ncol, 0.0);
  w.xb.assign(m, 0.0);
  w.d1.assign(ncol, 0.0);
  w.d2.assign(ncol, 0.0);
  w.lob.assign(ncol, 0.0);
  w.upb.assign(ncol, kInf);
  w.val.assign(ncol, 0.0);
  w.basis.assign(m, -1);
  w.stat.assign(ncol, kAtLower);
  w.rowsign.assign(m, 1.0);
  w.art_used.assign(m, 0);

  for (int j = 0; j < n; ++j) {
    w.lob[j] = lo_in[j];
    w.upb[j] = std::min(up_in[j], kInf);
  }
  for (int j = art0; j < ncol; ++j) w.upb[j] = kInf;

  bool any_art = false;
  for (int i = 0; i < m; ++i) {
    const double* arow = &P.a[static_cast<std::size_t>(i) * n];
    double act = 0.0;
    for (int j = 0; j < n; ++j) act += arow[j] * lo_in[j];
    double resid = P.b[i] - act;

    double s = 1.0;
    int basic;
    if (P.rel[i] == Rel::Le && resid >= 0.0) {
      basic = P.slack_col[i];
      w.xb[i] = resid;
    } else if (P.rel[i] == Rel::Ge && resid <= 0.0) {
      s = -1.0;
      basic = P.slack_col[i];
      w.xb[i] = -resid;
    } else {
      s = (resid >= 0.0) ? 1.0 : -1.0;
      basic = art0 + i;
      w.xb[i] = std::fabs(resid);
      w.art_used[i] = 1;
      any_art = true;
    }
    w.rowsign[i] = s;
    w.basis[i] = basic;
    w.stat[basic] = kBasic;

    double* trow = &w.tab[static_cast<std::size_t>(i) * ncol];
    for (int j = 0; j < n; ++j) trow[j] = s * arow[j];
    if (P.slack_col[i] >= 0)
      trow[P.slack_col[i]] = s * (P.rel[i] == Rel::Le ? 1.0 : -1.0);
    trow[art0 + i] = 1.0;
  }
  // Unused artificials never enter: pin them at zero.
  for (int i = 0; i < m; ++i)
    if (!w.art_used[i]) w.upb[art0 + i] = 0.0;

  // Reduced costs.  Phase-1 costs are 1 on used artificials; phase-2 costs
  // live on the structurals.  Both rows are maintained through every pivot.
  for (int i = 0; i < m; ++i)
    if (w.art_used[i]) w.d1[art0 + i] = 1.0;
  for (int j = 0; j < n; ++j) w.d2[j] = P.c[j];
  for (int i = 0; i < m; ++i) {
    if (w.art_used[i])
      axpy(-1.0, &w.tab[static_cast<std::size_t>(i) * ncol], w.d1.data(), ncol);
  }

  const std::int64_t max_iters = 20000 + 50ll * (m + ncol);
  bool bland = false;
  int degen_run = 0;

  auto phase1_obj = [&]() {
    double v = 0.0;
    for (int i = 0; i < m; ++i)
      if (w.basis[i] >= art0 && w.art_used[w.basis[i] - art0]) v += w.xb[i];
    return v;
  };

  // One simplex phase driven by cost row d.  Returns 0 on phase optimum,
  // 1 on unbounded, 2 on iteration limit.
  auto run_phase = [&](std::vector<double>& d, bool phase1) -> int {
    for (;;) {
      if (out.iters > max_iters) return 2;
      if (phase1 && phase1_obj() <= 1e-12) return 0;

      int q = -1;
      double best = kTolCost;
      for (int j = 0; j < ncol; ++j) {
        if (w.stat[j] == kBasic) continue;
        if (w.lob[j] == w.upb[j]) continue;
        double dj = d[j];
        double score;
        if (w.stat[j] == kAtLower && dj < -kTolCost) score = -dj;
        else if (w.stat[j] == kAtUpper && dj > kTolCost) score = dj;
        else continue;
        if (bland) { q = j; break; }
        if (score > best) { best = score; q = j; }
      }
      if (q < 0) return 0;

      const double sigma = (w.stat[q] == kAtLower) ? 1.0 : -1.0;
      double t_best = kInf;
      int row = -1;
      double piv_abs = 0.0;
      if (w.upb[q] < kInf) t_best = w.upb[q] - w.lob[q];

      for (int i = 0; i < m; ++i) {
        double tq = w.tab[static_cast<std::size_t>(i) * ncol + q];
        double ai = sigma * tq;
        double t;
        if (ai > kTolPiv) {
          t = (w.xb[i] - w.lob[w.basis[i]]) / ai;
        } else if (ai < -kTolPiv) {
          double ub = w.upb[w.basis[i]];
          if (ub == kInf) continue;
          t = (ub - w.xb[i]) / (-ai);
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        if (t < t_best - kTolRatio) {
          t_best = t;
          row = i;
          piv_abs = std::fabs(tq);
        } else if (row >= 0 && t <= t_best + kTolRatio) {
          if (bland) {
            if (w.basis[i] < w.basis[row]) { row = i; piv_abs = std::fabs(tq); }
          } else if (std::fabs(tq) > piv_abs * (1.0 + 1e-12)) {
            row = i;
            piv_abs = std::fabs(tq);
          } else if (std::fabs(tq) >= piv_abs * (1.0 - 1e-12) &&
                     w.basis[i] < w.basis[row]) {
            row = i;
            piv_abs = std::fabs(tq);
          }
        }
      }
      if (t_best == kInf) return 1;

      if (t_best <= 1e-12) {
        if (++degen_run > 500 + 2 * m) bland = true;
      } else {
        degen_run = 0;
      }

      const double delta = sigma * t_best;
      if (row < 0) {
        for (int i = 0; i < m; ++i)
          w.xb[i] -= delta * w.tab[static_cast<std::size_t>(i) * ncol + q];
        w.stat[q] = (w.stat[q] == kAtLower) ? kAtUpper : kAtLower;
      } else {
        const int leaving = w.basis[row];
        const double arow_q = sigma * w.tab[static_cast<std::size_t>(row) * ncol + q];
        const double vq =
            ((sigma > 0.0) ? w.lob[q] : w.upb[q]) + delta;
        for (int i = 0; i < m; ++i)
          w.xb[i] -= delta * w.tab[static_cast<std::size_t>(i) * ncol + q];
        w.stat[leaving] = (arow_q > 0.0) ? kAtLower : kAtUpper;
        w.basis[row] = q;
        w.stat[q] = kBasic;
        w.xb[row] = vq;

        double* prow = &w.tab[static_cast<std::size_t>(row) * ncol];
        scale(1.0 / prow[q], prow, ncol);
        for (int i = 0; i < m; ++i) {
          if (i == row) continue;
          double* trow = &w.tab[static_cast<std::size_t>(i) * ncol];
          double f = trow[q];
          if (f != 0.0) axpy(-f, prow, trow, ncol);
        }
        double f1 = w.d1[q];
        if (f1 != 0.0) axpy(-f1, prow, w.d1.data(), ncol);
        double f2 = w.d2[q];
        if (f2 != 0.0) axpy(-f2, prow, w.d2.data(), ncol);
      }
      ++out.iters;
    }
  };

  if (any_art) {
    int rc1 = run_phase(w.d1, true);
    if (rc1 == 2) { out.status = SolveStatus::Limit; return out; }
    if (rc1 == 1 || phase1_obj() > kTolFeas) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    // Drive basic artificials (all at zero now) out of the basis where the
    // row allows it; rows that do not admit a pivot are dependent and keep
    // the artificial pinned at zero.
    for (int r = 0; r < m; ++r) {
      int bv = w.basis[r];
      if (bv < art0 || !w.art_used[bv - art0]) continue;
      const double* trow = &w.tab[static_cast<std::size_t>(r) * ncol];
      int q = -1;
      double best = 1e-7;
      for (int j = 0; j < art0; ++j) {
        if (w.stat[j] == kBasic) continue;
        double aj = std::fabs(trow[j]);
        if (aj > best * (1.0 + 1e-12)) { best = aj; q = j; }
      }
      if (q < 0) continue;
      double* prow = &w.tab[static_cast<std::size_t>(r) * ncol];
      // Degenerate pivot: the entering variable keeps its bound value.
      double vq = (w.stat[q] == kAtUpper) ? w.upb[q] : w.lob[q];
      w.stat[bv] = kAtLower;
      w.basis[r] = q;
      w.stat[q] = kBasic;
      w.xb[r] = vq;
      scale(1.0 / prow[q], prow, ncol);
      for (int i = 0; i < m; ++i) {
        if (i == r) continue;
        double* ti = &w.tab[static_cast<std::size_t>(i) * ncol];
        double f = ti[q];
        if (f != 0.0) axpy(-f, prow, ti, ncol);
      }
      double f2 = w.d2[q];
      if (f2 != 0.0) axpy(-f2, prow, w.d2.data(), ncol);
      ++out.iters;
    }
    for (int i = 0; i < m; ++i) w.upb[art0 + i] = 0.0;
  }

  bland = false;
  degen_run = 0;
  int rc2 = run_phase(w.d2, false);
  if (rc2 == 2) { out.status = SolveStatus::Limit; return out; }
  if (rc2 == 1) { out.status = SolveStatus::Unbounded; return out; }

  for (int j = 0; j < ncol; ++j)
    w.val[j] = (w.stat[j] == kAtUpper) ? w.upb[j] : w.lob[j];
  for (int i = 0; i < m; ++i) w.val[w.basis[i]] = w.xb[i];

  out.x.assign(w.val.begin(), w.val.begin() + n);
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += P.c[j] * out.x[j];
  out.obj = obj;
  out.rc.assign(w.d2.begin(), w.d2.begin() + n);
  out.y.resize(m);
  for (int i = 0; i < m; ++i) out.y[i] = -w.rowsign[i] * w.d2[art0 + i];
  out.status = SolveStatus::Optimal;
  return out;
}

double frac_part(double v) {
  double f = v - std::floor(v);
  return std::min(f, 1.0 - f);
}

struct BnbNode {
  double bound;  // LP bound, min sense
  std::int64_t id;
  std::vector<double> lo, up;
  int bvar;
  double bval;
};

struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Fixes var v to 1 in (lo,up) and tightens packing rows; false on conflict.
bool propagate_fix_one(const Prepared& P, std::vector<double>& lo,
                       std::vector<double>& up, int v) {
  std::vector<int> work{v};
  lo[v] = 1.0;
  if (up[v] < 0.5) return false;
  while (!work.empty()) {
    int u = work.back();
    work.pop_back();
    for (int pi : P.packs_of[u]) {
      const auto& pk = P.packs[pi];
      double minact = 0.0;
      for (const Term& t : pk.terms)
        if (lo[t.var] > 0.5) minact += t.coef;
      if (minact > pk.rhs + 1e-9) return false;
      for (const Term& t : pk.terms) {
        if (lo[t.var] > 0.5 || up[t.var] < 0.5) continue;
        if (minact + t.coef > pk.rhs + 1e-9) {
          up[t.var] = 0.0;
          if (lo[t.var] > 0.5) return false;
        }
      }
    }
  }
  return true;
}

int most_fractional(const Prepared& P, const std::vector<double>& x) {
  int best = -1;
  double bestf = kTolInt;
  for (int j = 0; j < P.n; ++j) {
    if (!P.isint[j]) continue;
    double f = frac_part(x[j]);
    if (f > bestf) { bestf = f; best = j; }
  }
  return best;
}

}  // namespace

SolveResult solve_lp(const LinearModel& model) {
  Prepared P = prepare(model);
  Workspace w;
  LpOut o = lp_run(P, P.lo, P.up, w);
  SolveResult r;
  r.status = o.status;
  r.iterations = o.iters;
  if (o.status != SolveStatus::Optimal) return r;
  const double sgn = P.maximize ? -1.0 : 1.0;
  r.objective = sgn * o.obj;
  r.bound = r.objective;
  r.x = std::move(o.x);
  r.duals.resize(o.y.size());
  for (std::size_t i = 0; i < o.y.size(); ++i) r.duals[i] = sgn * o.y[i];
  r.reduced_costs.resize(o.rc.size());
  for (std::size_t j = 0; j < o.rc.size(); ++j) r.reduced_costs[j] = sgn * o.rc[j];
  return r;
}

SolveResult solve_milp(const LinearModel& model, const SolveOptions& opt) {
  Prepared P = prepare(model);
  Workspace w;
  SolveResult res;
  const double sgn = P.maximize ? -1.0 : 1.0;
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  bool has_int = false;
  for (int j = 0; j < P.n; ++j) has_int |= (P.isint[j] != 0);

  std::int64_t total_iters = 0;

  if (!has_int) {
    LpOut o = lp_run(P, P.lo, P.up, w);
    res.status = o.status;
    res.iterations = o.iters;
    if (o.status == SolveStatus::Optimal) {
      res.objective = sgn * o.obj;
      res.bound = res.objective;
      res.x = std::move(o.x);
    }
    return res;
  }

  bool have_inc = false;
  double inc_obj = kInf;  // min sense
  std::vector<double> inc_x;
  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> heap;
  std::int64_t next_id = 0;
  std::int64_t processed = 0;
  bool hit_limit = false;
  bool root_unbounded = false;

  // Exact continuous completion for an integral point; falls back to the raw
  // LP point if refixing runs into tolerance trouble.
  auto accept_integral = [&](const std::vector<double>& x_raw, double obj_raw,
                             const std::vector<double>& lo,
                             const std::vector<double>& up) {
    std::vector<double> flo = lo, fup = up;
    for (int j = 0; j < P.n; ++j) {
      if (!P.isint[j]) continue;
      double r = std::round(x_raw[j]);
      flo[j] = fup[j] = r;
    }
    LpOut o = lp_run(P, flo, fup, w);
    total_iters += o.iters;
    const std::vector<double>* xp = &x_raw;
    double ob = obj_raw;
    if (o.status == SolveStatus::Optimal && o.obj <= obj_raw + 1e-9) {
      xp = &o.x;
      ob = o.obj;
    }
    if (ob < inc_obj - 1e-9) {
      inc_obj = ob;
      inc_x = *xp;
      for (int j = 0; j < P.n; ++j)
        if (P.isint[j]) inc_x[j] = std::round(inc_x[j]);
      have_inc = true;
    }
  };

  // Solves the LP for a bounds pair; either prunes, records an incumbent, or
  // pushes a node carrying its branching variable.
  auto attempt = [&](std::vector<double>&& lo, std::vector<double>&& up,
                     bool is_root) {
    LpOut o = lp_run(P, lo, up, w);
    total_iters += o.iters;
    if (o.status == SolveStatus::Unbounded) {
      if (is_root) root_unbounded = true;
      return;
    }
    if (o.status == SolveStatus::Limit) { hit_limit = true; return; }
    if (o.status != SolveStatus::Optimal) return;
    if (o.obj >= inc_obj - 1e-9) return;
    int v = most_fractional(P, o.x);
    if (v < 0) {
      accept_integral(o.x, o.obj, lo, up);
      return;
    }
    heap.push(BnbNode{o.obj, next_id++, std::move(lo), std::move(up), v,
                      o.x[v]});
  };

  auto dive = [&](std::vector<double> lo, std::vector<double> up) {
    int nint = 0;
    for (int j = 0; j < P.n; ++j) nint += P.isint[j] ? 1 : 0;
    for (int step = 0; step <= nint; ++step) {
      LpOut o = lp_run(P, lo, up, w);
      total_iters += o.iters;
      if (o.status != SolveStatus::Optimal) return;
      if (o.obj >= inc_obj - 1e-9) return;
      int v = most_fractional(P, o.x);
      if (v < 0) {
        accept_integral(o.x, o.obj, lo, up);
        return;
      }
      double r = std::round(o.x[v]);
      if (r > 0.5) {
        if (!propagate_fix_one(P, lo, up, v)) return;
      } else {
        up[v] = 0.0;
      }
    }
  };

  attempt(std::vector<double>(P.lo), std::vector<double>(P.up), true);
  if (root_unbounded) {
    res.status = SolveStatus::Unbounded;
    res.iterations = total_iters;
    return res;
  }
  if (!heap.empty()) dive(P.lo, P.up);

  double best_bound = have_inc && heap.empty() ? inc_obj : -kInf;
  SolveStatus final_status = SolveStatus::Optimal;

  while (!heap.empty()) {
    if (hit_limit || processed >= opt.max_nodes || elapsed() > opt.time_limit_s) {
      final_status = SolveStatus::Limit;
      best_bound = heap.top().bound;
      break;
    }
    BnbNode node = heap.top();
    heap.pop();
    best_bound = node.bound;
    if (have_inc) {
      double gap_now = (inc_obj - best_bound) / std::max(1e-9, std::fabs(inc_obj));
      if (gap_now <= opt.gap + 1e-12) {
        final_status = (gap_now <= 1e-9) ? SolveStatus::Optimal
                                         : SolveStatus::GapFeasible;
        break;
      }
      if (node.bound >= inc_obj - 1e-9) continue;
    }
    ++processed;
    if (opt.log_every > 0 && processed % opt.log_every == 0) {
      std::fprintf(stderr, "bnb: nodes=%lld open=%zu bound=%.9g inc=%.9g\n",
                   static_cast<long long>(processed), heap.size(),
                   sgn * best_bound, have_inc ? sgn * inc_obj : 0.0);
    }

    const int v = node.bvar;
    {
      std::vector<double> lo = node.lo, up = node.up;
      up[v] = 0.0;
      attempt(std::move(lo), std::move(up), false);
    }
    {
      std::vector<double> lo = std::move(node.lo), up = std::move(node.up);
      if (propagate_fix_one(P, lo, up, v))
        attempt(std::move(lo), std::move(up), false);
    }

    if ((!have_inc && processed % 25 == 0) || processed % 500 == 0) {
      if (!heap.empty()) dive(heap.top().lo, heap.top().up);
    }
  }

  if (heap.empty() && final_status == SolveStatus::Optimal) {
    best_bound = have_inc ? inc_obj : kInf;
  }

  res.nodes = processed;
  res.iterations = total_iters;
  if (!have_inc) {
    res.status = (final_status == SolveStatus::Limit || hit_limit)
                     ? SolveStatus::Limit
                     : SolveStatus::Infeasible;
    res.bound = sgn * best_bound;
    return res;
  }
  res.status = final_status;
  res.objective = sgn * inc_obj;
  res.bound = sgn * best_bound;
  res.gap = std::max(0.0, (inc_obj - best_bound) /
                              std::max(1e-9, std::fabs(inc_obj)));
  res.x = std::move(inc_x);
  return res;
}

// ---------------------------------------------------------------------------
// CPLEX-LP text format
// ---------------------------------------------------------------------------

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.'))
      return false;
  }
  return true;
}

void append_terms(std::string& line, const std::vector<Term>& terms,
                  const std::vector<LinearModel::Var>& vars) {
  bool first = true;
  for (const Term& t : terms) {
    double c = t.coef;
    if (first) {
      line += (c < 0.0) ? " -" : " ";
      first = false;
    } else {
      line += (c < 0.0) ? " - " : " + ";
    }
    line += g17(std::fabs(c));
    line += ' ';
    line += vars[t.var].name;
  }
}

struct Tok {
  std::vector<std::string> t;
  std::size_t pos = 0;
  bool done() const { return pos >= t.size(); }
  const std::string& peek() const { return t[pos]; }
  std::string next() { return t[pos++]; }
};

bool is_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

}  // namespace

void export_model(const LinearModel& m, const std::string& path) {
  for (const auto& v : m.vars)
    if (!valid_name(v.name))
      throw std::invalid_argument("unusable variable name: '" + v.name + "'");
  for (const auto& c : m.cons)
    if (!valid_name(c.name))
      throw std::invalid_argument("unusable constraint name: '" + c.name + "'");

  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "\\Problem name: " << m.name << "\n";
  if (m.minmax_epigraph_var >= 0)
    f << "\\Epigraph: " << m.vars[m.minmax_epigraph_var].name << "\n";
  f << (m.sense == Sense::Maximize ? "Maximize\n" : "Minimize\n");
  {
    std::string line = " obj:";
    std::vector<Term> ot;
    for (std::size_t j = 0; j < m.vars.size(); ++j)
      if (m.vars[j].obj != 0.0)
        ot.push_back({static_cast<int>(j), m.vars[j].obj});
    append_terms(line, ot, m.vars);
    f << line << "\n";
  }
  f << "Subject To\n";
  for (const auto& c : m.cons) {
    std::string line = " " + c.name + ":";
    append_terms(line, c.terms, m.vars);
    switch (c.rel) {
      case Rel::Le: line += " <= "; break;
      case Rel::Ge: line += " >= "; break;
      case Rel::Eq: line += " = "; break;
    }
    line += g17(c.rhs);
    f << line << "\n";
  }
  f << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.lo == v.up) {
      f << " " << v.name << " = " << g17(v.lo) << "\n";
    } else if (v.up == kInf) {
      f << " " << v.name << " >= " << g17(v.lo) << "\n";
    } else {
      f << " " << g17(v.lo) << " <= " << v.name << " <= " << g17(v.up) << "\n";
    }
  }
  bool any_bin = false;
  for (const auto& v : m.vars) any_bin |= (v.kind == VarKind::Binary);
  if (any_bin) {
    f << "Binaries\n";
    for (const auto& v : m.vars)
      if (v.kind == VarKind::Binary) f << " " << v.name << "\n";
  }
  f << "End\n";
}

LinearModel import_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);

  LinearModel m;
  enum Sect { kNone, kObj, kSubj, kBounds, kBin, kEnd };
  Sect sect = kNone;
  std::vector<std::string> bin_names;
  std::string epigraph_name;

  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto trim = [](std::string s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return std::string();
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  };

  // Ordered variable registry.
  std::vector<std::string> var_order;
  std::vector<std::array<double, 2>> var_bounds;
  std::unordered_map<std::string, int> var_ids;
  auto var_index = [&](const std::string& name) -> int {
    auto it = var_ids.find(name);
    if (it != var_ids.end()) return it->second;
    int id = static_cast<int>(var_order.size());
    var_ids.emplace(name, id);
    var_order.push_back(name);
    var_bounds.push_back({0.0, kInf});
    return id;
  };

  std::string rawline;
  std::vector<std::pair<Sect, std::string>> body;
  while (std::getline(f, rawline)) {
    std::string line = trim(rawline);
    if (line.empty()) continue;
    if (line[0] == '\\') {
      const std::string kName = "\\Problem name:";
      const std::string kEpi = "\\Epigraph:";
      if (line.rfind(kName, 0) == 0) m.name = trim(line.substr(kName.size()));
      else if (line.rfind(kEpi, 0) == 0) epigraph_name = trim(line.substr(kEpi.size()));
      continue;
    }
    std::string low = lower(line);
    if (low == "minimize" || low == "min" || low == "minimise") {
      m.sense = Sense::Minimize; sect = kObj; continue;
    }
    if (low == "maximize" || low == "max" || low == "maximise") {
      m.sense = Sense::Maximize; sect = kObj; continue;
    }
    if (low == "subject to" || low == "st" || low == "s.t." || low == "such that") {
      sect = kSubj; continue;
    }
    if (low == "bounds" || low == "bound") { sect = kBounds; continue; }
    if (low == "binaries" || low == "binary" || low == "bin") { sect = kBin; continue; }
    if (low == "generals" || low == "general" || low == "gen")
      throw std::runtime_error("general integer section not supported");
    if (low == "end") { sect = kEnd; continue; }
    body.emplace_back(sect, line);
  }

  // Bounds first so canonical files keep their variable order.
  for (auto& [s, line] : body) {
    if (s != kBounds) continue;
    std::istringstream is(line);
    std::vector<std::string> tk;
    std::string t;
    while (is >> t) tk.push_back(t);
    double num;
    if (tk.size() == 5 && is_number(tk[0], &num) && tk[1] == "<=" && tk[3] == "<=") {
      double up;
      if (!is_number(tk[4], &up)) throw std::runtime_error("bad bounds line: " + line);
      int j = var_index(tk[2]);
      var_bounds[j] = {num, up};
    } else if (tk.size() == 3 && is_number(tk[2], &num)) {
      int j = var_index(tk[0]);
      if (tk[1] == ">=") var_bounds[j][0] = num;
      else if (tk[1] == "<=") var_bounds[j][1] = num;
      else if (tk[1] == "=") var_bounds[j] = {num, num};
      else throw std::runtime_error("bad bounds line: " + line);
    } else if (tk.size() == 3 && is_number(tk[0], &num) && tk[1] == "<=") {
      int j = var_index(tk[2]);
      var_bounds[j][0] = num;
    } else if (tk.size() == 2 && lower(tk[1]) == "free") {
      throw std::runtime_error("free variables not supported: " + line);
    } else {
      throw std::runtime_error("bad bounds line: " + line);
    }
  }
  for (auto& [s, line] : body) {
    if (s == kBin) {
      std::istringstream is(line);
      std::string t;
      while (is >> t) { bin_names.push_back(t); var_index(t); }
    }
  }

  // Tokenize objective and constraints as one stream each.
  auto tokenize = [&](Sect which) {
    Tok tok;
    for (auto& [s, line] : body) {
      if (s != which) continue;
      std::istringstream is(line);
      std::string t;
      while (is >> t) tok.t.push_back(t);
    }
    return tok;
  };

  struct ParsedRow {
    std::string label;
    std::vector<std::pair<std::string, double>> terms;
  };

  // Reads [sign] [coef] name triples until a relation token or stream end.
  auto read_terms = [&](Tok& tok, std::vector<std::pair<std::string, double>>& out,
                        std::string* rel_out) {
    double sign = 1.0;
    bool have_coef = false;
    double coef = 1.0;
    while (!tok.done()) {
      std::string t = tok.peek();
      if (t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">" ||
          t == "=<" || t == "=>") {
        if (rel_out) { *rel_out = t; tok.next(); }
        return;
      }
      // A new label like "c12:" ends the term list of the previous row.
      if (t.size() > 1 && t.back() == ':') return;
      if (!tok.done() && tok.pos + 1 < tok.t.size() && tok.t[tok.pos + 1] == ":")
        return;
      tok.next();
      if (t == "+") { continue; }
      if (t == "-") { sign = -sign; continue; }
      double v;
      if (is_number(t, &v)) {
        if (have_coef) coef *= v;  // tolerate "2 3 x" never produced by us
        else { coef = v; have_coef = true; }
        continue;
      }
      // Merged sign and number, e.g. "+3" handled by is_number above;
      // token is a variable name.
      out.emplace_back(t, sign * coef);
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    if (rel_out) rel_out->clear();
  };

  Tok otok = tokenize(kObj);
  std::vector<std::pair<std::string, double>> obj_terms;
  if (!otok.done()) {
    // Optional leading label.
    if (otok.peek().size() > 1 && otok.peek().back() == ':') otok.next();
    else if (otok.t.size() > 1 && otok.t[1] == ":") { otok.next(); otok.next(); }
    read_terms(otok, obj_terms, nullptr);
  }
  for (auto& [nm, c] : obj_terms) var_index(nm);

  Tok stok = tokenize(kSubj);
  struct RawCon {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    Rel rel;
    double rhs;
  };
  std::vector<RawCon> rawcons;
  while (!stok.done()) {
    RawCon rc;
    std::string t = stok.next();
    if (t.size() > 1 && t.back() == ':') {
      rc.name = t.substr(0, t.size() - 1);
    } else if (!stok.done() && stok.peek() == ":") {
      rc.name = t;
      stok.next();
    } else {
      // Unnamed row: the token belongs to the terms.
      --stok.pos;
    }
    std::string rel;
    read_terms(stok, rc.terms, &rel);
    if (rel.empty()) throw std::runtime_error("constraint missing relation");
    if (rel == "<=" || rel == "<" || rel == "=<") rc.rel = Rel::Le;
    else if (rel == ">=" || rel == ">" || rel == "=>") rc.rel = Rel::Ge;
    else rc.rel = Rel::Eq;
    if (stok.done()) throw std::runtime_error("constraint missing rhs");
    double rhs;
    std::string rt = stok.next();
    double rsign = 1.0;
    if (rt == "-") { rsign = -1.0; rt = stok.next(); }
    else if (rt == "+") { rt = stok.next(); }
    if (!is_number(rt, &rhs)) throw std::runtime_error("bad rhs: " + rt);
    rc.rhs = rsign * rhs;
    for (auto& [nm, c] : rc.terms) var_index(nm);
    rawcons.push_back(std::move(rc));
  }

  for (std::size_t j = 0; j < var_order.size(); ++j)
    m.add_var(var_order[j], var_bounds[j][0], var_bounds[j][1],
              VarKind::Continuous, 0.0);
  for (const std::string& b : bin_names) {
    int j = var_index(b);
    m.vars[j].kind = VarKind::Binary;
  }
  for (auto& [nm, c] : obj_terms) m.vars[var_index(nm)].obj += c;
  int ci = 0;
  for (auto& rc : rawcons) {
    std::vector<Term> terms;
    terms.reserve(rc.terms.size());
    for (auto& [nm, c] : rc.terms) terms.push_back({var_index(nm), c});
    m.add_constraint(rc.name.empty() ? "c" + std::to_string(ci) : rc.name,
                     std::move(terms), rc.rel, rc.rhs);
    ++ci;
  }
  if (!epigraph_name.empty()) {
    for (std::size_t j = 0; j < m.vars.size(); ++j)
      if (m.vars[j].name == epigraph_name)
        m.minmax_epigraph_var = static_cast<int>(j);
  }
  return m;
}

}  // namespace fon::optim
