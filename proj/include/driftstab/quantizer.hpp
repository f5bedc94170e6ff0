#pragma once

#include <cmath>
#include <cstdint>

namespace driftstab {

// Uniform K-bin quantizer with overflow symbol K+1 and an adaptive bin size
// constrained to the exact base-2 lattice: log2(delta) = s * idx with idx an
// integer. Zoom-in subtracts A_exp lattice steps (factor alpha = 2^{-A s}),
// zoom-out adds B_exp steps (factor 2^{B s}, which plays the role of
// |a| + delta). Keeping the index integral is what makes the bin-size
// component of the state countable; the realized bin size is always
// recomputed from the index, never accumulated multiplicatively in floats.
struct QuantizerConfig {
  int K = 4;                 // granular bin count, even, >= 2
  double s = 0.5;            // lattice step for log2 of the bin size
  int A_exp = 1;             // zoom-in steps (A~)
  int B_exp = 2;             // zoom-out steps (B~)
  long long L_idx = 1;       // lattice index of the zoom-in threshold L

  double alpha() const { return std::exp2(-s * A_exp); }
  double zoom_out_gain() const { return std::exp2(s * B_exp); }  // |a| + delta
  double rate_R() const { return std::log2(static_cast<double>(K) + 1.0); }
  double rate_Rp() const { return std::log2(static_cast<double>(K)); }
  // Smallest reachable index; realized floor L' = alpha * L = 2^{s*(L_idx-A)}.
  long long floor_idx() const { return L_idx - A_exp; }
};

struct BinSizeIndex {
  long long idx = 0;
};

struct QuantizerOutput {
  int symbol = 0;     // 1..K granular, K+1 overflow
  double value = 0.0; // reconstruction level; 0 for overflow
};

// Realized bin size 2^{s*idx}, computed fresh from the integer index.
double realized_delta(const QuantizerConfig& cfg, BinSizeIndex delta);

// Checks every config invariant against the plant gain a and the channel
// success probability p; throws ConfigError naming the violated one.
void validate(const QuantizerConfig& cfg, double a, double p);

// The three-case uniform quantizer map Q_K^delta. Throws InputError on
// non-finite x.
QuantizerOutput quantize(const QuantizerConfig& cfg, BinSizeIndex delta,
                         double x);

// Reconstruction level of a channel symbol at the given bin size
// (granular bin centers; 0 for the overflow symbol).
double reconstruction_level(const QuantizerConfig& cfg, BinSizeIndex delta,
                            int symbol);

// h = x / (delta * 2^{R'-1}); |h| <= 1 iff x lies in the granular region.
double overflow_ratio(const QuantizerConfig& cfg, BinSizeIndex delta,
                      double x);

// The zoom map H on the lattice: out when |h| > 1 or the transmission was
// erased, in when granular + received + delta >= L, hold otherwise.
BinSizeIndex update_bin(const QuantizerConfig& cfg, BinSizeIndex delta,
                        double h, bool erasure_ok);

// Searches for the smallest zoom-in exponent A~ coprime to B_exp such that
// some lattice step s satisfies all rate inequalities, then places s at the
// midpoint of the feasible interval. L_idx is set to A_exp so that the
// realized floor is exactly 1. Throws SynthesisError naming the violated
// inequality when no A~ <= 64 works.
QuantizerConfig snap_gains_to_lattice(double a, double p, int K, int B_exp);

}  // namespace driftstab
