#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

// Linear and mixed-integer linear optimization used by the planning phases.
// The solver is a bounded-variable two-phase primal simplex plus a
// branch-and-bound wrapper; models can also be exported in CPLEX-LP text
// format for inspection or for running through an external engine.

namespace fon::optim {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };
enum class VarKind { Continuous, Binary };
enum class Rel { Le, Ge, Eq };

enum class SolveStatus {
  Optimal,      // proven optimal (gap ~ 0)
  GapFeasible,  // MILP incumbent within the requested gap
  Infeasible,
  Unbounded,
  Limit,        // node/iteration/time limit hit; best incumbent returned
};

struct Term {
  int var;
  double coef;
};

class LinearModel {
 public:
  struct Var {
    std::string name;
    double lo = 0.0;
    double up = kInf;
    VarKind kind = VarKind::Continuous;
    double obj = 0.0;
  };
  struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Rel rel = Rel::Le;
    double rhs = 0.0;
  };

  Sense sense = Sense::Minimize;
  std::string name = "model";
  std::vector<Var> vars;
  std::vector<Constraint> cons;
  // When >= 0, marks the variable acting as the epigraph of a min-max
  // objective; purely informational for exports and diagnostics.
  int minmax_epigraph_var = -1;

  // Lower bounds must be finite; an upper bound may be +inf.
  int add_var(const std::string& vname, double lo, double up, VarKind kind,
              double obj = 0.0);
  int add_constraint(const std::string& cname, std::vector<Term> terms,
                     Rel rel, double rhs);

  int num_binaries() const;
  // Activity of constraint c under assignment x.
  double activity(int c, const std::vector<double>& x) const;
  // Max relative violation of constraints and bounds under x.
  double max_violation(const std::vector<double>& x) const;
};

struct SolveOptions {
  double gap = 0.0;            // relative MILP termination gap
  double time_limit_s = 900.0;
  std::int64_t max_nodes = 50'000'000;
  // Report search progress every this many nodes (0 = quiet).
  std::int64_t log_every = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;        // in the model's sense
  double bound = 0.0;            // best proven bound, model's sense
  double gap = 0.0;              // achieved relative gap (MILP)
  std::vector<double> x;         // variable values
  std::vector<double> duals;     // per-constraint duals (LP solves only)
  std::vector<double> reduced_costs;  // per-variable (LP solves only)
  std::int64_t nodes = 0;
  std::int64_t iterations = 0;   // simplex pivots, summed over node solves

  bool feasible() const {
    return status == SolveStatus::Optimal || status == SolveStatus::GapFeasible ||
           (status == SolveStatus::Limit && !x.empty());
  }
};

// Solves the continuous relaxation (binaries treated as bounded continuous).
SolveResult solve_lp(const LinearModel& m);

// Branch-and-bound over the LP relaxation: most-fractional branching,
// best-bound node selection, bound propagation on packing rows, and a
// diving primal heuristic.  Deterministic for identical inputs.
SolveResult solve_milp(const LinearModel& m, const SolveOptions& opt = {});

// Writes the model in CPLEX-LP text format.  The writer is canonical:
// exporting an imported model reproduces the file byte for byte.
void export_model(const LinearModel& m, const std::string& path);
LinearModel import_model(const std::string& path);

std::string status_name(SolveStatus s);

}  // namespace fon::optim
