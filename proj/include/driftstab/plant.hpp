#pragma once

#include "driftstab/rng.hpp"

namespace driftstab {

// Scalar LTI plant x_{t+1} = a x_t + b u_t + d_t with d_t ~ N(0, noise_std^2).
// The open-loop gain must satisfy |a| >= 1 (unstable or marginally stable)
// and b must be nonzero so the plant is stabilizable.
struct PlantParams {
  double a = 2.5;
  double b = 1.0;
  double noise_std = 1.0;
  double x0 = 0.0;
};

// Throws ConfigError on |a| < 1, b == 0, noise_std <= 0, or non-finite values.
void validate(const PlantParams& params);

// One plant update, evaluated as the single expression a*x + b*u + d.
double step_plant(const PlantParams& params, double x, double u, double d);

// One Gaussian noise draw N(0, noise_std^2); advances the stream by one word.
double sample_noise(const PlantParams& params, Rng& rng);

}  // namespace driftstab
