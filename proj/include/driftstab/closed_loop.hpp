#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include "driftstab/channel.hpp"
#include "driftstab/plant.hpp"
#include "driftstab/quantizer.hpp"
#include "driftstab/rng.hpp"

namespace driftstab {

// Everything needed to run the coupled chain (x_t, delta_t).
struct SimParams {
  PlantParams plant;
  QuantizerConfig quant;
  ChannelParams chan;
};

void validate(const SimParams& params);

struct LoopState {
  double x = 0.0;
  BinSizeIndex delta;
};

struct StepRecord {
  long long t = 0;
  double x = 0.0;        // state at time t (before the update)
  double delta = 0.0;    // realized bin size at time t
  long long delta_idx = 0;
  double h = 0.0;        // overflow ratio at time t
  bool erasure_ok = false;  // Upsilon_t
  int symbol = 0;        // channel input symbol
  double x_hat = 0.0;    // decoder output
  double u = 0.0;        // control input, -(a/b) x_hat
  bool is_stop = false;  // |h| <= 1 and the channel delivered
};

// One transition of the Markov chain: observe, quantize, transmit (with the
// erasure outcome supplied), decode, control, plant update, bin update.
// Throws NumericEscapeError (carrying t) when the next state is non-finite.
std::pair<LoopState, StepRecord> loop_step(const SimParams& params,
                                           const LoopState& state,
                                           double noise, bool erasure_ok,
                                           long long t);

struct Trajectory {
  SimParams params;
  long long delta0_idx = 0;
  RandomStream stream;
  std::vector<StepRecord> records;
  std::vector<long long> stop_times;
};

// Incremental driver owning the noise and channel substreams of one
// trajectory. Noise uses substream 0 of (seed, stream_id), the channel
// substream 1, so trajectories are reproducible and independent.
class ClosedLoopSim {
 public:
  ClosedLoopSim(const SimParams& params, RandomStream stream,
                LoopState initial);

  // Advance one step; erasure outcomes are drawn from the channel substream.
  StepRecord step();
  // Advance one step with the erasure outcome forced (used to condition on
  // a successful reception, e.g. when sampling inter-stop intervals).
  StepRecord step_forced(bool erasure_ok);

  const LoopState& state() const { return state_; }
  long long time() const { return t_; }

 private:
  StepRecord advance(bool erasure_ok);

  const SimParams& params_;
  LoopState state_;
  BinSizeIndex decoder_delta_;
  Rng noise_rng_;
  Rng chan_rng_;
  long long t_ = 0;
};

// Runs T steps from (plant.x0, delta0_idx). Requires delta0_idx >= L_idx
// (the paper's "Delta_0 >= L, otherwise arbitrary" convention).
Trajectory simulate(const SimParams& params, long long T, RandomStream stream,
                    long long delta0_idx);

// Indices with is_stop set, in increasing order.
std::vector<long long> detect_stopping_times(const Trajectory& traj);

// CSV export: header `t,x,delta,h,erasure_ok,symbol,x_hat,u,is_stop`, floats
// printed with 17 significant digits. header_comment, when nonempty, is
// emitted first as a `#` line.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::string_view header_comment = {});

}  // namespace driftstab
