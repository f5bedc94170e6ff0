#pragma once

#include "driftstab/quantizer.hpp"
#include "driftstab/rng.hpp"

namespace driftstab {

// Memoryless erasure channel over {1, ..., K+1}: the input symbol arrives
// intact with probability p, otherwise the erasure symbol is produced.
struct ChannelParams {
  double p = 0.9;
  int alphabet_size = 5;  // K + 1
};

void validate(const ChannelParams& params);

struct ChannelOutput {
  bool received = false;  // false means erased
  int symbol = 0;         // valid only when received
};

// One channel use; consumes exactly one uniform variate from the stream.
// Throws InputError when the symbol is outside the alphabet.
ChannelOutput transmit(const ChannelParams& params, int symbol, Rng& rng);

struct Decoded {
  double x_hat = 0.0;
  bool success = false;  // true iff the channel delivered (any symbol)
};

// The decoder map: erased -> (0, false); received granular symbol -> its
// reconstruction level; received overflow symbol -> 0 but success stays
// true, since the controller still learns that the state overflowed.
Decoded decode(const ChannelOutput& out, const QuantizerConfig& cfg,
               BinSizeIndex delta);

// Bin update as the decoder can perform it from the channel output alone:
// erasure or overflow symbol means zoom out, a granular symbol means the
// state was inside the granular region. Used to assert transmitter/receiver
// bin-size agreement.
BinSizeIndex decoder_update_bin(const QuantizerConfig& cfg, BinSizeIndex delta,
                                const ChannelOutput& out);

}  // namespace driftstab
