#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "driftstab/closed_loop.hpp"

namespace driftstab {

// Run-control knobs shared by the experiment subcommands.
struct RunParams {
  long long T = 10000;
  int n_traj = 8;
  std::uint64_t seed = 1;
  int m = 2;
  long long delta0_idx = 0;  // defaults to the resolved L_idx
  int k_max = 10;
};

// Parsed form of the experiment config file: three nested sections for the
// plant, quantizer and channel plus the run section. The quantizer is given
// either by (K, B_exp) for lattice synthesis or fully explicitly with
// s and A_exp.
struct ExperimentConfig {
  PlantParams plant;
  double channel_p = 0.9;
  int K = 4;
  int B_exp = 2;
  std::optional<double> s;
  std::optional<int> A_exp;
  std::optional<long long> L_idx;
  RunParams run;
  bool run_delta0_given = false;
};

// Parses the `[section] key = value` format; unknown sections or keys are
// errors naming the exact field path.
ExperimentConfig parse_experiment_config(std::istream& is);
ExperimentConfig parse_experiment_config_file(const std::string& path);

struct ResolvedExperiment {
  SimParams sim;
  RunParams run;
  std::string canonical;  // deterministic serialization of everything
  std::string hash;       // FNV-1a of the canonical text, hex
};

// Synthesizes or validates the quantizer, fills derived fields and the
// config hash. Honors the DRIFTSTAB_SEED environment override.
ResolvedExperiment resolve(const ExperimentConfig& cfg);

}  // namespace driftstab
