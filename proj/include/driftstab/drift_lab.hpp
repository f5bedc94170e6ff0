#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "driftstab/rng.hpp"

namespace driftstab::driftlab {

// Finite-state chain given by a row-stochastic matrix. Row sums must equal
// one within 1e-12 and entries must be nonnegative.
struct FiniteChain {
  Eigen::MatrixXd P;
  int n() const { return static_cast<int>(P.rows()); }
};

void validate_chain(const FiniteChain& chain);

// Strongly connected components of the positive-entry digraph, in discovery
// order. The chain is irreducible iff there is exactly one.
std::vector<std::vector<int>> communicating_classes(const FiniteChain& chain);
bool is_irreducible(const FiniteChain& chain);

// Unique invariant distribution pi with pi P = pi, sum pi = 1, solved as a
// dense linear system. Throws StructureError (listing the communicating
// classes) for reducible chains; the residual is checked to 1e-12.
Eigen::VectorXd stationary_dist(const FiniteChain& chain);

// Generalized Kac formula: lhs = pi(f) directly; rhs accumulates the
// expected f-cost over excursions from A, using the return-time system
// g = f + P 1_{A^c} g. Requires f >= 0 and A nonempty.
struct KacResult {
  double lhs = 0.0;
  double rhs = 0.0;
};
KacResult kac_moment(const FiniteChain& chain, const Eigen::VectorXd& f,
                     const std::vector<int>& A);

// Expected f-cost up to the hitting of C as a linear solve.
//   inclusive=false: sum_{t=0}^{tau_C - 1} f, tau_C = min{t>=1: phi_t in C}
//   inclusive=true:  sum through the hitting state, sigma_C = min{t>=0:...};
//                    this variant satisfies P V* = V* - f exactly off C.
Eigen::VectorXd hitting_cost(const FiniteChain& chain, const Eigen::VectorXd& f,
                             const std::vector<int>& C, bool inclusive);

// V3 constant extracted from the inclusive hitting cost:
// b_f = max over C of (P V* - V* + f).
double v3_constant(const FiniteChain& chain, const Eigen::VectorXd& f,
                   const std::vector<int>& C);

// Stopping rules for the sampled chain: a fixed block length, a
// state-dependent block length, or the first entry into a target set.
struct StopRule {
  enum class Kind { FixedN, StateDependent, Hitting };
  Kind kind = Kind::FixedN;
  int n = 1;                        // FixedN
  std::vector<int> n_per_state;     // StateDependent
  std::vector<int> target;          // Hitting
};

struct DriftSpec {
  Eigen::VectorXd V;      // > 0
  Eigen::VectorXd f;      // >= 1
  Eigen::VectorXd delta;  // >= 1
  std::vector<int> C;
  double b = 0.0;
  StopRule stop;
};

void validate_spec(const FiniteChain& chain, const DriftSpec& spec);

struct DriftStateRow {
  int state = 0;
  bool in_C = false;
  double V = 0.0;
  double delta = 0.0;
  double EV_next = 0.0;    // E[V at the next stop | start here]
  double Ef_block = 0.0;   // E[sum of f over the block | start here]
  double ET_block = 0.0;   // E[block length | start here]
  double ineq1_margin = 0.0;  // V - delta + b 1_C - EV_next
  bool ineq1_ok = false;
  double ineq2_margin = 0.0;  // delta - Ef_block
  bool ineq2_ok = false;
};

struct DriftReport {
  std::vector<DriftStateRow> rows;
  bool ineq1_ok_all = false;
  bool ineq1_ok_off_C = false;
  bool ineq2_ok_all = false;
  double min_b = 0.0;      // smallest b making inequality 1 hold on C
  double max_ET = 0.0;     // sup over states of E[block length]
};

// Exact verification of the random-time drift pair of inequalities for
// every start state, via matrix powers (fixed / state-dependent rules) or
// first-passage linear systems (hitting rules).
DriftReport verify_random_time_drift(const FiniteChain& chain,
                                     const DriftSpec& spec);

struct SupermartingaleViolation {
  int start = 0;
  int state = 0;      // state at the stop where the drift is positive
  long long t = 0;    // time of that stop along the prefix
  int z = 0;          // stop count
  char flavor = 'f';  // 'f' or 'd'
  double drift = 0.0; // E[M_{z+1} | prefix] - M_z
};

struct SupermartingaleReport {
  bool ok_f = true;         // V + block-f-sum sequence
  bool ok_delta = true;     // V + delta-sum sequence
  double min_slack_f = 0.0;
  double min_slack_delta = 0.0;
  long long prefixes_checked = 0;
  std::vector<SupermartingaleViolation> violations;  // capped sample
};

// Enumerates every path prefix (pruned below prune_prob) up to the horizon
// from each start state, tracks the supermartingale values at successive
// stops, and checks E[M_{z+1} | prefix] <= M_z for both sequences used in
// the proofs (the delta-sum one and the f-sum one). The conditional
// expectations are exact solves, not truncations.
SupermartingaleReport supermartingale_check(const FiniteChain& chain,
                                            const DriftSpec& spec, int horizon,
                                            double prune_prob = 1e-12,
                                            long long max_prefixes = 2000000);

struct PiFBoundReport {
  double pi_f = 0.0;
  double b_f = 0.0;
  double pi_C = 0.0;
  double bound = 0.0;     // b_f * pi(C)
  double identity_residual = 0.0;  // pi(f) - sum_C pi (PV*-V*+f)
  bool ok = false;        // pi(f) <= b_f
};

// pi(f) against the V3 constant of the inclusive hitting cost on spec.C,
// the finite-chain form of the Feller bound E_pi[f] <= c.
PiFBoundReport verify_pi_f_bound(const FiniteChain& chain,
                                 const DriftSpec& spec);

// One step of the chain from the given state (CDF inversion on the row).
int sample_step(const FiniteChain& chain, int state, Rng& rng);

// Plain-text I/O: a chain file is one whitespace-separated row per line; a
// spec file holds lines `V = ...`, `f = ...`, `delta = ...`, `C = ...`,
// `b = ...`, `stop = fixed n | state_dependent n0 n1 ... | hitting i j ...`.
FiniteChain load_chain(std::istream& is);
FiniteChain load_chain_file(const std::string& path);
DriftSpec load_drift_spec(std::istream& is, int n);
DriftSpec load_drift_spec_file(const std::string& path, int n);

}  // namespace driftstab::driftlab
