#include "driftstab/channel.hpp"

#include <string>

#include "driftstab/errors.hpp"

namespace driftstab {

void validate(const ChannelParams& params) {
  if (!(params.p > 0.0 && params.p <= 1.0)) {
    throw ConfigError("channel.p: must lie in (0,1], got " +
                      std::to_string(params.p));
  }
  if (params.alphabet_size < 3) {
    throw ConfigError("channel.alphabet_size: must be K+1 >= 3");
  }
}

ChannelOutput transmit(const ChannelParams& params, int symbol, Rng& rng) {
  if (symbol < 1 || symbol > params.alphabet_size) {
    throw InputError("transmit: symbol " + std::to_string(symbol) +
                     " outside alphabet {1,...," +
                     std::to_string(params.alphabet_size) + "}");
  }
  if (rng.uniform01() < params.p) {
    return {true, symbol};
  }
  return {false, 0};
}

Decoded decode(const ChannelOutput& out, const QuantizerConfig& cfg,
               BinSizeIndex delta) {
  if (!out.received) {
    return {0.0, false};
  }
  return {reconstruction_level(cfg, delta, out.symbol), true};
}

BinSizeIndex decoder_update_bin(const QuantizerConfig& cfg, BinSizeIndex delta,
                                const ChannelOutput& out) {
  const bool zoom_out = !out.received || out.symbol == cfg.K + 1;
  if (zoom_out) {
    return {delta.idx + cfg.B_exp};
  }
  if (delta.idx >= cfg.L_idx) {
    return {delta.idx - cfg.A_exp};
  }
  return delta;
}

}  // namespace driftstab
