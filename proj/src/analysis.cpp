#include "driftstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <thread>

#include "driftstab/errors.hpp"

namespace driftstab {

namespace {

// Runs fn(i) for i in [0, n); work is split into contiguous chunks so the
// result layout is independent of the worker count.
void parallel_for(long long n, int jobs, const std::function<void(long long)>& fn) {
  if (jobs <= 1 || n < 2 * jobs) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  const long long chunk = (n + jobs - 1) / jobs;
  for (int w = 0; w < jobs; ++w) {
    const long long lo = w * chunk;
    const long long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (long long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

// Neumaier compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

ConditionReport make_report(double a, double p, int K, int m,
                            std::optional<double> alpha,
                            std::optional<double> gain) {
  ConditionReport rep;
  rep.K = K;
  rep.m = m;
  rep.lattice_given = alpha.has_value();
  const double abs_a = std::fabs(a);
  const double Kd = static_cast<double>(K);

  rep.capacity_margin = std::log2(Kd) * p - std::log2(abs_a);
  rep.capacity_ok = rep.capacity_margin > 0.0;

  const double rbdd2_floor = abs_a / Kd;  // |a| 2^{-R'}
  if (alpha) {
    rep.rbdd2_margin = *alpha - rbdd2_floor;
    rep.rbdd3_value = *alpha * std::pow(*gain, 1.0 / p - 1.0);
  } else {
    // Best case over admissible lattices: alpha -> 1 for the margin,
    // alpha -> |a| 2^{-R'} and delta -> 0 for the zoom product.
    rep.rbdd2_margin = 1.0 - rbdd2_floor;
    rep.rbdd3_value = rbdd2_floor * std::pow(abs_a, 1.0 / p - 1.0);
  }
  rep.rbdd2_ok = rep.rbdd2_margin > 0.0;
  rep.rbdd3_ok = rep.rbdd3_value < 1.0;

  const double md = static_cast<double>(m);
  // 2^R - 1 = K, 2^R = K + 1.
  rep.moment_value =
      std::pow(abs_a, md) * ((1.0 - p) + p / std::pow(Kd, md));
  rep.moment_ok = rep.moment_value < 1.0;
  rep.minero_value =
      std::pow(abs_a, md) * ((1.0 - p) + p / std::pow(Kd + 1.0, md));
  rep.minero_ok = rep.minero_value < 1.0;
  return rep;
}

}  // namespace

ConditionReport check_conditions(double a, double b, double p,
                                 const QuantizerConfig& cfg, int m) {
  if (b == 0.0) {
    throw ConfigError("check_conditions: b must be nonzero");
  }
  validate(cfg, a, p);
  return make_report(a, p, cfg.K, m, cfg.alpha(), cfg.zoom_out_gain());
}

ConditionReport check_conditions_rate_only(double a, double b, double p,
                                           int K, int m) {
  if (b == 0.0) {
    throw ConfigError("check_conditions: b must be nonzero");
  }
  if (K < 2) {
    throw ConfigError("check_conditions: K must be >= 2");
  }
  return make_report(a, p, K, m, std::nullopt, std::nullopt);
}

int min_bins_for_second_moment(double a, double p) {
  const double denom = 1.0 / (a * a) - (1.0 - p);
  if (!(denom > 0.0)) {
    throw SynthesisError(
        "min_bins_for_second_moment: infeasible, 1/a^2 <= 1-p (no finite "
        "rate gives a second moment)");
  }
  return static_cast<int>(std::ceil(std::sqrt(p / denom))) + 1;
}

double TailBoundParams::C_const(double delta0) const {
  return 2.0 * sigma_prime /
         (std::sqrt(2.0 * M_PI) * (2.0 * N_const - 1.0) * delta0 / 2.0);
}

double TailBoundParams::Xi_k(int k, double delta0) const {
  const double arg =
      (std::pow(xi, k - 2) * N_const - 0.5) * delta0;
  return arg * arg / (2.0 * sigma_prime * sigma_prime);
}

TailBoundParams make_tail_bound_params(const PlantParams& plant,
                                       const QuantizerConfig& cfg) {
  const double abs_a = std::fabs(plant.a);
  if (!(abs_a > 1.0)) {
    throw ConfigError(
        "tail bounds require |a| > 1 (sigma'^2 = E[d^2]/(1 - |a|^-2))");
  }
  TailBoundParams tb;
  const double var = plant.noise_std * plant.noise_std;
  tb.sigma_prime = std::sqrt(var / (1.0 - 1.0 / (abs_a * abs_a)));
  tb.xi = cfg.zoom_out_gain() / abs_a;
  tb.N_const = (0.5 * cfg.K) * cfg.alpha() / abs_a;
  if (!(tb.xi > 1.0)) {
    throw ConfigError("tail bounds: xi = (|a|+delta)/|a| must exceed 1");
  }
  if (!(tb.N_const > 0.5)) {
    throw ConfigError("tail bounds: N = 2^{R'-1} alpha/|a| must exceed 1/2");
  }
  return tb;
}

double tail_lower_bound(int k, double p) {
  if (k < 1) throw InputError("tail_lower_bound: k >= 1 required");
  return std::pow(1.0 - p, k - 1);
}

double tail_upper_bound(int k, double delta0, const TailBoundParams& tb,
                        double p) {
  if (k < 1) throw InputError("tail_upper_bound: k >= 1 required");
  double theta = 1.0;
  const double C = tb.C_const(delta0);
  for (int j = 2; j <= k; ++j) {
    theta = theta * (1.0 - p) + C * std::exp(-tb.Xi_k(j, delta0));
  }
  return theta;
}

WilsonInterval wilson_interval(long long count, long long n, double z) {
  const double phat = static_cast<double>(count) / static_cast<double>(n);
  const double z2n = z * z / static_cast<double>(n);
  const double denom = 1.0 + z2n;
  const double center = (phat + 0.5 * z2n) / denom;
  const double half =
      z *
      std::sqrt(phat * (1.0 - phat) / static_cast<double>(n) +
                0.25 * z2n / static_cast<double>(n)) /
      denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

// One conditioned inter-stop block: stop forced at time 0 from a
// perfectly-zoomed start, runs until the next stop. Returns the interval
// length and the lattice index at the stop.
struct BlockSample {
  long long interval = 0;
  long long idx_at_stop = 0;
};

BlockSample sample_inter_stop_block(const SimParams& params,
                                    long long delta0_idx, RandomStream rs) {
  const QuantizerConfig& cfg = params.quant;
  const double delta0 = realized_delta(cfg, BinSizeIndex{delta0_idx});

  // x0 uniform over the bin [0, Delta_0) just right of the origin; any
  // granular choice satisfies the half-bin error bound the analysis needs.
  Rng init(rs, 2);
  const double x0 = delta0 * init.uniform01();

  ClosedLoopSim sim(params, rs, LoopState{x0, BinSizeIndex{delta0_idx}});
  const StepRecord first = sim.step_forced(true);
  if (!first.is_stop) {
    throw std::logic_error(
        "sample_inter_stop_block: conditioned start was not a stop");
  }
  constexpr long long kCap = 100000000;
  while (true) {
    const StepRecord rec = sim.step();
    if (rec.is_stop) {
      return {rec.t, rec.delta_idx};
    }
    if (rec.t > kCap) {
      throw NumericEscapeError(
          "sample_inter_stop_block: no stop within cap", rec.t);
    }
  }
}

}  // namespace

TailEstimate estimate_stopping_tail(const SimParams& params,
                                    long long delta0_idx, long long n_samples,
                                    int k_max, std::uint64_t seed, int jobs) {
  validate(params);
  if (delta0_idx < params.quant.L_idx) {
    throw InputError("estimate_stopping_tail: delta0_idx must be >= L_idx");
  }
  if (n_samples < 1 || k_max < 1) {
    throw InputError("estimate_stopping_tail: n_samples and k_max >= 1");
  }

  std::vector<long long> intervals(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, jobs, [&](long long i) {
    intervals[static_cast<std::size_t>(i)] =
        sample_inter_stop_block(params, delta0_idx,
                                RandomStream{seed, static_cast<std::uint64_t>(i)})
            .interval;
  });

  TailEstimate est;
  est.n_samples = n_samples;
  est.delta0_idx = delta0_idx;
  est.delta0 = realized_delta(params.quant, BinSizeIndex{delta0_idx});

  long long max_t = 0;
  for (long long t : intervals) max_t = std::max(max_t, t);
  est.intervals_histogram.assign(static_cast<std::size_t>(max_t) + 1, 0);
  for (long long t : intervals) {
    ++est.intervals_histogram[static_cast<std::size_t>(t)];
  }

  const TailBoundParams tb = make_tail_bound_params(params.plant, params.quant);
  est.sandwich_ok = true;
  // tail_count[k] = #{samples with T >= k}, by suffix sum over the histogram.
  std::vector<long long> tail_count(static_cast<std::size_t>(max_t) + 2, 0);
  for (long long t = max_t; t >= 1; --t) {
    tail_count[static_cast<std::size_t>(t)] =
        tail_count[static_cast<std::size_t>(t) + 1] +
        est.intervals_histogram[static_cast<std::size_t>(t)];
  }

  for (int k = 1; k <= k_max; ++k) {
    TailRow row;
    row.k = k;
    const long long count =
        (k <= max_t) ? tail_count[static_cast<std::size_t>(k)] : 0;
    row.empirical =
        static_cast<double>(count) / static_cast<double>(n_samples);
    const WilsonInterval ci = wilson_interval(count, n_samples, kZ99);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    row.lower = tail_lower_bound(k, params.chan.p);
    row.upper = tail_upper_bound(k, est.delta0, tb, params.chan.p);
    row.lower_ok = row.lower <= row.ci_hi + 1e-12;
    row.upper_ok = row.ci_lo <= row.upper + 1e-12;
    est.sandwich_ok = est.sandwich_ok && row.lower_ok && row.upper_ok;
    est.rows.push_back(row);
  }
  return est;
}

MomentEstimate estimate_moment(const SimParams& params, int m, long long T,
                               int n_traj, std::uint64_t seed,
                               long long delta0_idx, double diag_tol,
                               int jobs) {
  validate(params);
  if (m < 1 || T < 2 || n_traj < 1) {
    throw InputError("estimate_moment: need m >= 1, T >= 2, n_traj >= 1");
  }
  if (delta0_idx < params.quant.L_idx) {
    throw InputError("estimate_moment: delta0_idx must be >= L_idx");
  }

  MomentEstimate est;
  est.m = m;
  est.T = T;
  est.diag_tol = diag_tol;
  est.per_traj.assign(static_cast<std::size_t>(n_traj), {});

  const long long half = T / 2;
  parallel_for(n_traj, jobs, [&](long long j) {
    MomentTrajectory out;
    out.stream_id = static_cast<std::uint64_t>(j);
    ClosedLoopSim sim(params, RandomStream{seed, out.stream_id},
                      LoopState{params.plant.x0, BinSizeIndex{delta0_idx}});
    Kahan acc;
    try {
      for (long long t = 0; t < T; ++t) {
        const StepRecord rec = sim.step();
        acc.add(std::pow(std::fabs(rec.x), static_cast<double>(m)));
        if (t + 1 == half) {
          out.avg_half = acc.value() / static_cast<double>(half);
        }
      }
      out.avg_full = acc.value() / static_cast<double>(T);
      out.diagnostic =
          std::fabs(out.avg_full - out.avg_half) / out.avg_full;
      out.converged = out.diagnostic < diag_tol;
    } catch (const NumericEscapeError& e) {
      out.escaped = true;
      out.escape_step = e.step();
    }
    est.per_traj[static_cast<std::size_t>(j)] = out;
  });

  Kahan agg;
  long long n_ok = 0;
  for (const MomentTrajectory& tr : est.per_traj) {
    if (!tr.escaped) {
      agg.add(tr.avg_full);
      ++n_ok;
    }
  }
  est.aggregate = (n_ok > 0) ? agg.value() / static_cast<double>(n_ok) : 0.0;
  return est;
}

DriftEstimate estimate_drift_at_stops(const SimParams& params,
                                      long long n_samples,
                                      const std::vector<long long>& grid,
                                      std::uint64_t seed, int jobs) {
  validate(params);
  if (n_samples < 2) {
    throw InputError("estimate_drift_at_stops: n_samples >= 2 required");
  }
  const QuantizerConfig& cfg = params.quant;
  const double ln2 = std::log(2.0);

  DriftEstimate est;
  const double p = params.chan.p;
  est.analytic_limit = 2.0 * std::log(cfg.alpha()) +
                       2.0 * (1.0 / p - 1.0) * std::log(cfg.zoom_out_gain());

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const long long idx0 = grid[g];
    if (idx0 < cfg.L_idx) {
      throw InputError("estimate_drift_at_stops: grid index below L_idx");
    }
    std::vector<double> samples(static_cast<std::size_t>(n_samples));
    std::vector<long long> lengths(static_cast<std::size_t>(n_samples));
    const std::uint64_t base =
        static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(n_samples);
    parallel_for(n_samples, jobs, [&](long long i) {
      const BlockSample blk = sample_inter_stop_block(
          params, idx0,
          RandomStream{seed, base + static_cast<std::uint64_t>(i)});
      // V0 difference is lattice-exact: 2 s ln2 (idx_stop - idx_0).
      samples[static_cast<std::size_t>(i)] =
          2.0 * cfg.s * ln2 * static_cast<double>(blk.idx_at_stop - idx0);
      lengths[static_cast<std::size_t>(i)] = blk.interval;
    });

    Kahan sum;
    Kahan len_sum;
    for (long long i = 0; i < n_samples; ++i) {
      sum.add(samples[static_cast<std::size_t>(i)]);
      len_sum.add(static_cast<double>(lengths[static_cast<std::size_t>(i)]));
    }
    const double mean = sum.value() / static_cast<double>(n_samples);
    Kahan var_acc;
    for (long long i = 0; i < n_samples; ++i) {
      const double dev = samples[static_cast<std::size_t>(i)] - mean;
      var_acc.add(dev * dev);
    }
    const double sd =
        std::sqrt(var_acc.value() / static_cast<double>(n_samples - 1));
    const double half_width =
        kZ99 * sd / std::sqrt(static_cast<double>(n_samples));

    DriftRow row;
    row.delta0_idx = idx0;
    row.delta0 = realized_delta(cfg, BinSizeIndex{idx0});
    row.n = n_samples;
    row.drift = mean;
    row.ci_lo = mean - half_width;
    row.ci_hi = mean + half_width;
    row.mean_interval = len_sum.value() / static_cast<double>(n_samples);
    est.rows.push_back(row);
  }
  return est;
}

}  // namespace driftstab
