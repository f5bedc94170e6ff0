#include "driftstab/quantizer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "driftstab/errors.hpp"

namespace driftstab {

double realized_delta(const QuantizerConfig& cfg, BinSizeIndex delta) {
  const double log2d = cfg.s * static_cast<double>(delta.idx);
  if (std::fabs(log2d) > 1000.0) {
    throw NumericEscapeError(
        "bin size left the representable range, log2(delta) = " +
            std::to_string(log2d),
        -1);
  }
  return std::exp2(log2d);
}

void validate(const QuantizerConfig& cfg, double a, double p) {
  if (cfg.K < 2 || cfg.K % 2 != 0) {
    throw ConfigError("quantizer.K: even integer >= 2 required, got " +
                      std::to_string(cfg.K));
  }
  if (!(cfg.s > 0.0) || !std::isfinite(cfg.s)) {
    throw ConfigError("quantizer.s: must be a positive finite lattice step");
  }
  if (cfg.A_exp < 1 || cfg.B_exp < 1) {
    throw ConfigError("quantizer.A_exp/B_exp: must be positive integers");
  }
  if (std::gcd(cfg.A_exp, cfg.B_exp) != 1) {
    throw ConfigError("quantizer: gcd(A_exp, B_exp) must be 1, got gcd(" +
                      std::to_string(cfg.A_exp) + ", " +
                      std::to_string(cfg.B_exp) + ") != 1");
  }
  const double alpha = cfg.alpha();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("quantizer: alpha = 2^(-A_exp*s) must lie in (0,1)");
  }
  const double gain = cfg.zoom_out_gain();
  if (!(gain > std::fabs(a))) {
    throw ConfigError("quantizer: zoom-out gain 2^(B_exp*s) = " +
                      std::to_string(gain) + " must exceed |a| = " +
                      std::to_string(std::fabs(a)));
  }
  // alpha > |a| 2^{-R'}
  const double rbdd2_floor = std::fabs(a) / static_cast<double>(cfg.K);
  if (!(alpha > rbdd2_floor)) {
    throw ConfigError("quantizer: alpha = " + std::to_string(alpha) +
                      " must exceed |a|/K = " + std::to_string(rbdd2_floor));
  }
  // alpha (|a|+delta)^{1/p - 1} < 1
  const double rbdd3 = alpha * std::pow(gain, 1.0 / p - 1.0);
  if (!(rbdd3 < 1.0)) {
    throw ConfigError(
        "quantizer: alpha*(|a|+delta)^(1/p-1) = " + std::to_string(rbdd3) +
        " must be < 1");
  }
  // L' = alpha * L = 2^{s(L_idx - A_exp)} >= 1, exact on the lattice.
  if (cfg.L_idx < cfg.A_exp) {
    throw ConfigError("quantizer.L_idx: must be >= A_exp so that L' >= 1");
  }
}

QuantizerOutput quantize(const QuantizerConfig& cfg, BinSizeIndex delta,
                         double x) {
  if (!std::isfinite(x)) {
    throw InputError("quantize: non-finite input");
  }
  const double d = realized_delta(cfg, delta);
  const int K = cfg.K;
  const double half_range = 0.5 * K * d;
  if (x == half_range) {
    return {K, 0.5 * (K - 1) * d};
  }
  if (x < -half_range || x > half_range) {
    return {K + 1, 0.0};
  }
  // Bin k covers [(k-1-K/2)d, (k-K/2)d). Locate by division, then fix up
  // against the exact float interval bounds so boundary cases agree with
  // the piecewise definition.
  int k = static_cast<int>(std::floor(x / d + 0.5 * K)) + 1;
  if (k < 1) k = 1;
  if (k > K) k = K;
  while (k > 1 && x < (k - 1 - 0.5 * K) * d) --k;
  while (k < K && x >= (k - 0.5 * K) * d) ++k;
  return {k, (k - 0.5 * (K + 1)) * d};
}

double reconstruction_level(const QuantizerConfig& cfg, BinSizeIndex delta,
                            int symbol) {
  if (symbol < 1 || symbol > cfg.K + 1) {
    throw InputError("reconstruction_level: symbol out of alphabet");
  }
  if (symbol == cfg.K + 1) {
    return 0.0;
  }
  return (symbol - 0.5 * (cfg.K + 1)) * realized_delta(cfg, delta);
}

double overflow_ratio(const QuantizerConfig& cfg, BinSizeIndex delta,
                      double x) {
  return x / (realized_delta(cfg, delta) * (0.5 * cfg.K));
}

BinSizeIndex update_bin(const QuantizerConfig& cfg, BinSizeIndex delta,
                        double h, bool erasure_ok) {
  if (std::fabs(h) > 1.0 || !erasure_ok) {
    return {delta.idx + cfg.B_exp};
  }
  if (delta.idx >= cfg.L_idx) {
    return {delta.idx - cfg.A_exp};
  }
  return delta;
}

QuantizerConfig snap_gains_to_lattice(double a, double p, int K, int B_exp) {
  if (K < 2 || K % 2 != 0) {
    throw SynthesisError("synthesis: K must be an even integer >= 2");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw SynthesisError("synthesis: p must lie in (0,1]");
  }
  if (B_exp < 1) {
    throw SynthesisError("synthesis: B_exp must be a positive integer");
  }
  const double abs_a = std::fabs(a);
  const double log2a = std::log2(abs_a);
  const double log2K = std::log2(static_cast<double>(K));
  if (!(log2K * p > log2a)) {
    std::ostringstream os;
    os << "synthesis: infeasible, capacity-style condition log2(K)*p > "
          "log2|a| fails ("
       << log2K * p << " <= " << log2a << ")";
    throw SynthesisError(os.str());
  }

  // For fixed exponents the three inequalities reduce to
  //   2^{B s} > |a|                 <=>  s > log2|a| / B
  //   alpha > |a| 2^{-R'}           <=>  s < (log2 K - log2|a|) / A
  //   alpha (|a|+delta)^{1/p-1} < 1 <=>  A > B (1/p - 1)   (s-independent)
  const double s_lo = log2a / B_exp;
  const double rbdd3_threshold = B_exp * (1.0 / p - 1.0);
  const char* last_violation = "e:Rbdd2/e:Rbdd3";
  for (int A = 1; A <= 64; ++A) {
    if (std::gcd(A, B_exp) != 1) continue;
    if (!(static_cast<double>(A) > rbdd3_threshold)) {
      last_violation = "alpha*(|a|+delta)^(1/p-1) < 1";
      continue;
    }
    const double s_hi = (log2K - log2a) / A;
    if (!(s_lo < s_hi)) {
      last_violation = "alpha > |a|*2^(-R')";
      continue;
    }
    QuantizerConfig cfg;
    cfg.K = K;
    cfg.A_exp = A;
    cfg.B_exp = B_exp;
    cfg.s = 0.5 * (s_lo + s_hi);
    cfg.L_idx = A;  // realized floor L' = 2^{s*(L_idx - A)} = 1
    validate(cfg, a, p);
    return cfg;
  }
  std::ostringstream os;
  os << "synthesis: infeasible for a=" << a << " p=" << p << " K=" << K
     << " B_exp=" << B_exp << " with A_exp <= 64; violated inequality: "
     << last_violation;
  throw SynthesisError(os.str());
}

}  // namespace driftstab
