#include <doctest.h>

#include <cmath>
#include <numeric>

#include "driftstab/errors.hpp"
#include "driftstab/quantizer.hpp"
#include "driftstab/rng.hpp"

using namespace driftstab;

namespace {

QuantizerConfig unit_cfg(int K) {
  // s = 1 puts the lattice on powers of two; idx 0 realizes delta = 1.
  QuantizerConfig cfg;
  cfg.K = K;
  cfg.s = 1.0;
  cfg.A_exp = 1;
  cfg.B_exp = 2;
  cfg.L_idx = 1;
  return cfg;
}

}  // namespace

TEST_CASE("quantize: piecewise map on the worked K=4 cases") {
  const QuantizerConfig cfg = unit_cfg(4);
  const BinSizeIndex d0{0};  // delta = 1

  auto q = quantize(cfg, d0, 0.5);
  CHECK(q.symbol == 3);
  CHECK(q.value == 0.5);

  q = quantize(cfg, d0, 2.0);  // right boundary folds into bin K
  CHECK(q.symbol == 4);
  CHECK(q.value == 1.5);

  q = quantize(cfg, d0, 3.0);  // overflow
  CHECK(q.symbol == 5);
  CHECK(q.value == 0.0);

  q = quantize(cfg, d0, -1.2);
  CHECK(q.symbol == 1);
  CHECK(q.value == -1.5);

  q = quantize(cfg, d0, -2.0);  // left edge belongs to bin 1
  CHECK(q.symbol == 1);

  CHECK_THROWS_AS(quantize(cfg, d0, std::nan("")), InputError);
}

TEST_CASE("overflow_ratio h = x / (delta K/2)") {
  const QuantizerConfig cfg = unit_cfg(4);
  CHECK(overflow_ratio(cfg, BinSizeIndex{0}, 2.0) == 1.0);
  CHECK(overflow_ratio(cfg, BinSizeIndex{0}, 0.0) == 0.0);
  CHECK(overflow_ratio(cfg, BinSizeIndex{1}, -5.0) == -1.25);
}

TEST_CASE("update_bin: zoom out / in / hold and the floor") {
  const QuantizerConfig cfg = unit_cfg(4);
  CHECK(update_bin(cfg, BinSizeIndex{10}, 1.5, true).idx == 12);
  CHECK(update_bin(cfg, BinSizeIndex{10}, 0.3, false).idx == 12);
  CHECK(update_bin(cfg, BinSizeIndex{10}, 0.3, true).idx == 9);
  // |h| = 1 counts as granular (boundary zooms in)
  CHECK(update_bin(cfg, BinSizeIndex{10}, 1.0, true).idx == 9);
  // below L: hold
  CHECK(update_bin(cfg, BinSizeIndex{0}, 0.3, true).idx == 0);
  // floor is exactly L_idx - A_exp
  CHECK(update_bin(cfg, BinSizeIndex{cfg.L_idx}, 0.0, true).idx ==
        cfg.floor_idx());
}

TEST_CASE("config validation rejects each broken invariant") {
  const double a = 2.5, p = 0.9;
  QuantizerConfig cfg = snap_gains_to_lattice(a, p, 4, 2);
  CHECK_NOTHROW(validate(cfg, a, p));

  QuantizerConfig odd = cfg;
  odd.K = 5;
  CHECK_THROWS_AS(validate(odd, a, p), ConfigError);

  QuantizerConfig common_divisor = cfg;
  common_divisor.A_exp = 2;  // gcd(2,2) = 2
  CHECK_THROWS_AS(validate(common_divisor, a, p), ConfigError);

  QuantizerConfig low_floor = cfg;
  low_floor.L_idx = cfg.A_exp - 1;  // L' < 1
  CHECK_THROWS_AS(validate(low_floor, a, p), ConfigError);

  QuantizerConfig weak_zoom_out = cfg;
  weak_zoom_out.s = 0.3;  // 2^{2*0.3} = 1.52 < |a|
  CHECK_THROWS_AS(validate(weak_zoom_out, a, p), ConfigError);
}

TEST_CASE("lattice synthesis reproduces the worked 5-bin scenario") {
  const QuantizerConfig cfg = snap_gains_to_lattice(2.5, 0.9, 4, 2);
  CHECK(cfg.A_exp == 1);
  CHECK(cfg.B_exp == 2);
  // Feasible s interval is (log2(2.5)/2, 2 - log2(2.5)); midpoint rule.
  const double lo = std::log2(2.5) / 2.0;
  const double hi = 2.0 - std::log2(2.5);
  CHECK(cfg.s == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-15));
  CHECK(cfg.alpha() > 0.625);
  CHECK(cfg.alpha() == doctest::Approx(0.6293).epsilon(0.01));
  const double rbdd3 =
      cfg.alpha() * std::pow(cfg.zoom_out_gain(), 1.0 / 0.9 - 1.0);
  CHECK(rbdd3 < 1.0);
  CHECK(std::fabs(rbdd3 - 0.698) < 0.01);
  // floor realizes exactly 1
  CHECK(realized_delta(cfg, BinSizeIndex{cfg.floor_idx()}) == 1.0);
}

TEST_CASE("synthesis infeasibility at K=2 agrees with an exhaustive scan") {
  CHECK_THROWS_AS(snap_gains_to_lattice(2.5, 0.9, 2, 2), SynthesisError);

  // Oracle: no (A <= 8, s on a fine grid) satisfies all three inequalities.
  const double a = 2.5, p = 0.9;
  bool any_feasible = false;
  for (int A = 1; A <= 8 && !any_feasible; ++A) {
    if (std::gcd(A, 2) != 1) continue;
    for (int i = 1; i <= 20000; ++i) {
      const double s = 4.0 * i / 20000.0;
      const double alpha = std::exp2(-A * s);
      const double gain = std::exp2(2 * s);
      const bool ok = gain > a && alpha > a / 2.0 &&
                      alpha * std::pow(gain, 1.0 / p - 1.0) < 1.0;
      if (ok) {
        any_feasible = true;
        break;
      }
    }
  }
  CHECK_FALSE(any_feasible);
}

TEST_CASE("synthesis at the stability boundary plant") {
  const QuantizerConfig cfg = snap_gains_to_lattice(1.0, 0.5, 2, 2);
  CHECK_NOTHROW(validate(cfg, 1.0, 0.5));
  CHECK(cfg.alpha() > 0.5);  // rbdd2 floor |a|/K = 0.5
  CHECK(cfg.alpha() * std::pow(cfg.zoom_out_gain(), 1.0) < 1.0);
}

TEST_CASE("lattice exactness over a million random updates") {
  const QuantizerConfig cfg = snap_gains_to_lattice(2.5, 0.9, 4, 2);
  Rng rng(RandomStream{99, 0}, 0);
  BinSizeIndex delta{cfg.L_idx + 30};
  long long reference = delta.idx;
  for (int i = 0; i < 1000000; ++i) {
    const bool ok = rng.bernoulli(0.9);
    const double h = 2.5 * (rng.uniform01() - 0.5);
    delta = update_bin(cfg, delta, h, ok);
    // reference fold in plain integer arithmetic
    if (std::fabs(h) > 1.0 || !ok) {
      reference += cfg.B_exp;
    } else if (reference >= cfg.L_idx) {
      reference -= cfg.A_exp;
    }
    REQUIRE(delta.idx == reference);
    REQUIRE(delta.idx >= cfg.floor_idx());
  }
  // realized size is a pure function of the integer index
  CHECK(realized_delta(cfg, delta) == std::exp2(cfg.s * delta.idx));
}

TEST_CASE("k consecutive zoom-outs add exactly k*B_exp lattice steps") {
  const QuantizerConfig cfg = snap_gains_to_lattice(2.5, 0.9, 4, 2);
  BinSizeIndex delta{5};
  for (int k = 1; k <= 40; ++k) {
    delta = update_bin(cfg, delta, 2.0, true);
    CHECK(delta.idx == 5 + k * cfg.B_exp);
  }
}

TEST_CASE("partition and granular fidelity properties") {
  const QuantizerConfig cfg = snap_gains_to_lattice(2.5, 0.9, 4, 2);
  Rng rng(RandomStream{123, 0}, 0);
  for (int trial = 0; trial < 100000; ++trial) {
    const BinSizeIndex delta{static_cast<long long>(rng.next_u64() % 40)};
    const double d = realized_delta(cfg, delta);
    const double x = (rng.uniform01() - 0.5) * 6.0 * d;
    const QuantizerOutput q = quantize(cfg, delta, x);

    // exactly one symbol: membership count over the piecewise definition
    int members = 0;
    for (int k = 1; k <= cfg.K; ++k) {
      const double lo = (k - 1 - 0.5 * cfg.K) * d;
      const double hi = (k - 0.5 * cfg.K) * d;
      if (x >= lo && x < hi) ++members;
    }
    if (x == 0.5 * cfg.K * d) ++members;          // boundary case
    if (std::fabs(x) > 0.5 * cfg.K * d) ++members;  // overflow
    REQUIRE(members == 1);

    const double h = overflow_ratio(cfg, delta, x);
    if (std::fabs(h) <= 1.0 && x != 0.5 * cfg.K * d) {
      REQUIRE(q.symbol >= 1);
      REQUIRE(q.symbol <= cfg.K);
      REQUIRE(std::fabs(x - q.value) <= 0.5 * d);
    }
    if (q.symbol == cfg.K + 1) {
      REQUIRE(q.value == 0.0);
    }
  }
}
