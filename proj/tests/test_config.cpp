#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "driftstab/config.hpp"
#include "driftstab/errors.hpp"

using namespace driftstab;

namespace {

const char* kPaperConfig =
    "[plant]\n"
    "a = 2.5\n"
    "b = 1.0\n"
    "noise_std = 1.0\n"
    "[quantizer]\n"
    "K = 4\n"
    "B_exp = 2\n"
    "[channel]\n"
    "p = 0.9\n"
    "[run]\n"
    "T = 1000\n"
    "n_traj = 4\n"
    "seed = 7\n"
    "m = 2\n"
    "delta0_idx = 15\n"
    "k_max = 10\n";

}  // namespace

TEST_CASE("paper config parses and resolves via synthesis") {
  std::istringstream is(kPaperConfig);
  const ExperimentConfig cfg = parse_experiment_config(is);
  const ResolvedExperiment res = resolve(cfg);
  CHECK(res.sim.quant.K == 4);
  CHECK(res.sim.quant.A_exp == 1);
  CHECK(res.sim.quant.B_exp == 2);
  CHECK(res.sim.quant.alpha() > 0.625);
  CHECK(res.sim.chan.alphabet_size == 5);
  CHECK(res.run.seed == 7);
  CHECK(res.run.delta0_idx == 15);
  CHECK(res.hash.size() == 16);

  // resolution is deterministic
  std::istringstream is2(kPaperConfig);
  const ResolvedExperiment res2 = resolve(parse_experiment_config(is2));
  CHECK(res.hash == res2.hash);
  CHECK(res.canonical == res2.canonical);
}

TEST_CASE("unknown keys and sections fail with the exact path") {
  std::istringstream bad1(
      "[plant]\na=2.5\nb=1\nnoise_std=1\nturbo=9\n[quantizer]\nK=4\n"
      "[channel]\np=0.9\n");
  try {
    parse_experiment_config(bad1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("plant.turbo") != std::string::npos);
  }

  std::istringstream bad2("[rocket]\nthrust=1\n");
  CHECK_THROWS_AS(parse_experiment_config(bad2), ConfigError);
}

TEST_CASE("required fields and paired quantizer keys") {
  std::istringstream missing("[plant]\na=2.5\nb=1\n[quantizer]\nK=4\n"
                             "[channel]\np=0.9\n");
  CHECK_THROWS_AS(parse_experiment_config(missing), ConfigError);

  std::istringstream half_explicit(
      "[plant]\na=2.5\nb=1\nnoise_std=1\n[quantizer]\nK=4\ns=0.5\n"
      "[channel]\np=0.9\n");
  CHECK_THROWS_AS(parse_experiment_config(half_explicit), ConfigError);
}

TEST_CASE("explicit lattice parameters bypass synthesis") {
  std::istringstream is(
      "[plant]\na=2.5\nb=1\nnoise_std=1\n"
      "[quantizer]\nK=4\ns=0.6695179762781593\nA_exp=1\nB_exp=2\nL_idx=3\n"
      "[channel]\np=0.9\n");
  const ResolvedExperiment res = resolve(parse_experiment_config(is));
  CHECK(res.sim.quant.s == 0.6695179762781593);
  CHECK(res.sim.quant.L_idx == 3);
  // run.delta0_idx defaults to L_idx
  CHECK(res.run.delta0_idx == 3);
}

TEST_CASE("invalid explicit lattice is rejected on resolve") {
  std::istringstream is(
      "[plant]\na=2.5\nb=1\nnoise_std=1\n"
      "[quantizer]\nK=4\ns=0.2\nA_exp=1\nB_exp=2\n"  // 2^{0.4} < |a|
      "[channel]\np=0.9\n");
  const ExperimentConfig cfg = parse_experiment_config(is);
  CHECK_THROWS_AS(resolve(cfg), ConfigError);
}

TEST_CASE("DRIFTSTAB_SEED overrides the config seed") {
  setenv("DRIFTSTAB_SEED", "12345", 1);
  std::istringstream is(kPaperConfig);
  const ResolvedExperiment res = resolve(parse_experiment_config(is));
  unsetenv("DRIFTSTAB_SEED");
  CHECK(res.run.seed == 12345);

  std::istringstream is2(kPaperConfig);
  const ResolvedExperiment res2 = resolve(parse_experiment_config(is2));
  CHECK(res2.run.seed == 7);
  CHECK(res.hash != res2.hash);  // the hash covers the resolved seed
}
