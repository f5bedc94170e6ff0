#include "driftstab/closed_loop.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "driftstab/csv.hpp"
#include "driftstab/errors.hpp"

namespace driftstab {

void validate(const SimParams& params) {
  validate(params.plant);
  validate(params.quant, params.plant.a, params.chan.p);
  ChannelParams chan = params.chan;
  chan.alphabet_size = params.quant.K + 1;
  validate(chan);
  if (params.chan.alphabet_size != params.quant.K + 1) {
    throw ConfigError("channel.alphabet_size: must equal quantizer K + 1");
  }
}

std::pair<LoopState, StepRecord> loop_step(const SimParams& params,
                                           const LoopState& state,
                                           double noise, bool erasure_ok,
                                           long long t) {
  const PlantParams& plant = params.plant;
  const QuantizerConfig& cfg = params.quant;

  StepRecord rec;
  rec.t = t;
  rec.x = state.x;
  rec.delta_idx = state.delta.idx;
  try {
    rec.delta = realized_delta(cfg, state.delta);
  } catch (const NumericEscapeError& e) {
    throw NumericEscapeError(e.what(), t);
  }
  rec.h = overflow_ratio(cfg, state.delta, state.x);

  const QuantizerOutput q = quantize(cfg, state.delta, state.x);
  rec.symbol = q.symbol;
  rec.erasure_ok = erasure_ok;

  const ChannelOutput out =
      erasure_ok ? ChannelOutput{true, q.symbol} : ChannelOutput{false, 0};
  const Decoded dec = decode(out, cfg, state.delta);
  rec.x_hat = dec.x_hat;
  rec.u = -(plant.a / plant.b) * dec.x_hat;
  rec.is_stop = std::fabs(rec.h) <= 1.0 && erasure_ok;

  const double x_next = step_plant(plant, state.x, rec.u, noise);
  // Same transition written as a(x - Upsilon Q(x)) + d; the two forms may
  // differ only by rounding in u = -(a/b) x_hat.
  const double ups = erasure_ok ? 1.0 : 0.0;
  const double x_next_alt = plant.a * (state.x - ups * q.value) + noise;
  const double scale = std::fabs(plant.a * state.x) +
                       std::fabs(plant.b * rec.u) + std::fabs(noise) + 1.0;
  if (std::fabs(x_next - x_next_alt) > 1e-9 * scale) {
    throw std::logic_error("loop_step: transition forms disagree at t=" +
                           std::to_string(t));
  }
  if (!std::isfinite(x_next)) {
    throw NumericEscapeError(
        "loop_step: non-finite state at step " + std::to_string(t), t);
  }

  LoopState next;
  next.x = x_next;
  next.delta = update_bin(cfg, state.delta, rec.h, erasure_ok);
  return {next, rec};
}

ClosedLoopSim::ClosedLoopSim(const SimParams& params, RandomStream stream,
                             LoopState initial)
    : params_(params),
      state_(initial),
      decoder_delta_(initial.delta),
      noise_rng_(stream, 0),
      chan_rng_(stream, 1) {}

StepRecord ClosedLoopSim::advance(bool erasure_ok) {
  const double d = sample_noise(params_.plant, noise_rng_);
  auto [next, rec] = loop_step(params_, state_, d, erasure_ok, t_);

  // Receiver-side bin tracking from the channel output alone must agree
  // with the transmitter-side update at every step.
  const ChannelOutput out = erasure_ok ? ChannelOutput{true, rec.symbol}
                                       : ChannelOutput{false, 0};
  decoder_delta_ = decoder_update_bin(params_.quant, decoder_delta_, out);
  if (decoder_delta_.idx != next.delta.idx) {
    throw std::logic_error(
        "closed loop: transmitter and receiver bin sizes diverged at t=" +
        std::to_string(t_));
  }

  state_ = next;
  ++t_;
  return rec;
}

StepRecord ClosedLoopSim::step() {
  const bool ok = chan_rng_.bernoulli(params_.chan.p);
  return advance(ok);
}

StepRecord ClosedLoopSim::step_forced(bool erasure_ok) {
  return advance(erasure_ok);
}

Trajectory simulate(const SimParams& params, long long T, RandomStream stream,
                    long long delta0_idx) {
  validate(params);
  if (T < 1) {
    throw InputError("simulate: T must be >= 1");
  }
  if (delta0_idx < params.quant.L_idx) {
    throw InputError("simulate: delta0_idx must be >= L_idx (Delta_0 >= L)");
  }

  Trajectory traj;
  traj.params = params;
  traj.delta0_idx = delta0_idx;
  traj.stream = stream;
  traj.records.reserve(static_cast<std::size_t>(T));

  ClosedLoopSim sim(params, stream,
                    LoopState{params.plant.x0, BinSizeIndex{delta0_idx}});
  for (long long t = 0; t < T; ++t) {
    const StepRecord rec = sim.step();
    if (rec.is_stop) {
      traj.stop_times.push_back(rec.t);
    }
    traj.records.push_back(rec);
  }
  return traj;
}

std::vector<long long> detect_stopping_times(const Trajectory& traj) {
  std::vector<long long> stops;
  for (const StepRecord& rec : traj.records) {
    if (rec.is_stop) {
      stops.push_back(rec.t);
    }
  }
  return stops;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::string_view header_comment) {
  if (!header_comment.empty()) {
    os << "# " << header_comment << "\n";
  }
  os << "t,x,delta,h,erasure_ok,symbol,x_hat,u,is_stop\n";
  for (const StepRecord& r : traj.records) {
    os << r.t << ',' << csv::f17(r.x) << ',' << csv::f17(r.delta) << ','
       << csv::f17(r.h) << ',' << (r.erasure_ok ? 1 : 0) << ',' << r.symbol
       << ',' << csv::f17(r.x_hat) << ',' << csv::f17(r.u) << ','
       << (r.is_stop ? 1 : 0) << '\n';
  }
}

}  // namespace driftstab
