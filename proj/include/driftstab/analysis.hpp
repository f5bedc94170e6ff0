#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "driftstab/closed_loop.hpp"

namespace driftstab {

// All five stability inequalities with their margins/values, reported even
// when they fail. The rate variables are R = log2(K+1), R' = log2(K).
//
// When no lattice config is supplied, the alpha/delta-dependent rows report
// their best achievable margin over all admissible (alpha, delta): the
// supremum margin for alpha (alpha -> 1) and the infimum of the zoom
// product (alpha -> |a| 2^{-R'}, delta -> 0). A negative margin then means
// the inequality is infeasible at this rate for every lattice.
struct ConditionReport {
  int K = 0;
  int m = 2;
  bool lattice_given = false;
  double capacity_margin = 0.0;  // log2(K) p - log2|a|
  bool capacity_ok = false;
  double rbdd2_margin = 0.0;     // alpha - |a| 2^{-R'}
  bool rbdd2_ok = false;
  double rbdd3_value = 0.0;      // alpha (|a|+delta)^{1/p-1}
  bool rbdd3_ok = false;
  double moment_value = 0.0;     // |a|^m (1-p + p/(2^R - 1)^m)
  bool moment_ok = false;
  double minero_value = 0.0;     // |a|^m (1-p + p/2^{mR})
  bool minero_ok = false;
  bool all_ok() const {
    return capacity_ok && rbdd2_ok && rbdd3_ok && moment_ok && minero_ok;
  }
};

ConditionReport check_conditions(double a, double b, double p,
                                 const QuantizerConfig& cfg, int m);
ConditionReport check_conditions_rate_only(double a, double b, double p,
                                           int K, int m);

// Smallest total bin count K+1 giving a finite second moment,
// ceil(sqrt(p / (1/a^2 - (1-p)))) + 1. Throws SynthesisError when
// 1/a^2 <= 1-p (no finite rate suffices).
int min_bins_for_second_moment(double a, double p);

// Constants of the stopping-time tail recursion. Requires |a| > 1 (the
// geometric noise sum sigma'^2 = E[d^2]/(1 - |a|^{-2}) must be finite).
struct TailBoundParams {
  double sigma_prime = 0.0;  // sigma'
  double xi = 0.0;           // (|a|+delta)/|a|
  double N_const = 0.0;      // 2^{R'-1} alpha / |a|

  double C_const(double delta0) const;
  double Xi_k(int k, double delta0) const;  // defined for k >= 2
};

TailBoundParams make_tail_bound_params(const PlantParams& plant,
                                       const QuantizerConfig& cfg);

// (1-p)^{k-1}: valid for every realization.
double tail_lower_bound(int k, double p);

// The recursion Theta_1 = 1, Theta_k = Theta_{k-1}(1-p) + C exp(-Xi_k),
// an upper bound on P(T_1 >= k) from a perfectly-zoomed start at delta0.
double tail_upper_bound(int k, double delta0, const TailBoundParams& tb,
                        double p);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for count successes out of n at normal quantile z.
WilsonInterval wilson_interval(long long count, long long n, double z);

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99%

struct TailRow {
  int k = 0;
  double lower = 0.0;
  double empirical = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double upper = 0.0;
  bool lower_ok = false;  // lower <= empirical + CI
  bool upper_ok = false;  // empirical - CI <= upper
};

struct TailEstimate {
  std::vector<TailRow> rows;
  long long n_samples = 0;
  long long delta0_idx = 0;
  double delta0 = 0.0;
  bool sandwich_ok = false;
  std::vector<long long> intervals_histogram;  // counts of T = 1,2,...
};

// Samples n inter-stop intervals from a perfectly-zoomed start at
// delta0_idx: x0 uniform in the bin [0, Delta_0), reception forced
// successful at time 0, T_1 = first later step that is a stop. Sample i
// uses stream (seed, i).
TailEstimate estimate_stopping_tail(const SimParams& params,
                                    long long delta0_idx, long long n_samples,
                                    int k_max, std::uint64_t seed,
                                    int jobs = 1);

struct MomentTrajectory {
  std::uint64_t stream_id = 0;
  double avg_half = 0.0;   // running average over the first N/2 steps
  double avg_full = 0.0;   // running average over all N steps
  double diagnostic = 0.0; // |full - half| / full
  bool converged = false;  // diagnostic below the tolerance
  bool escaped = false;
  long long escape_step = -1;
};

struct MomentEstimate {
  std::vector<MomentTrajectory> per_traj;
  double aggregate = 0.0;  // mean of per-trajectory full averages
  int m = 2;
  long long T = 0;
  double diag_tol = 0.05;
};

// Time-averages of |x_t|^m over n_traj independent trajectories started at
// (plant.x0, delta0_idx); trajectory j uses stream (seed, j). Compensated
// summation keeps the reduction order-independent.
MomentEstimate estimate_moment(const SimParams& params, int m, long long T,
                               int n_traj, std::uint64_t seed,
                               long long delta0_idx, double diag_tol = 0.05,
                               int jobs = 1);

struct DriftRow {
  long long delta0_idx = 0;
  double delta0 = 0.0;
  long long n = 0;
  double drift = 0.0;  // mean of V0(next stop) - V0(now), V0 = log Delta^2
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double mean_interval = 0.0;
};

struct DriftEstimate {
  std::vector<DriftRow> rows;
  double analytic_limit = 0.0;  // 2 log alpha + 2 (1/p - 1) log(|a|+delta)
};

// Monte-Carlo drift of V0 = log(Delta^2) + B0 between consecutive stops,
// sampled from perfectly-zoomed starts on a grid of lattice indices. The
// drift sample is lattice-exact: 2 s ln2 (idx_at_stop - idx_0).
DriftEstimate estimate_drift_at_stops(const SimParams& params,
                                      long long n_samples,
                                      const std::vector<long long>& grid,
                                      std::uint64_t seed, int jobs = 1);

}  // namespace driftstab
