#include "driftstab/plant.hpp"

#include <cmath>
#include <string>

#include "driftstab/errors.hpp"

namespace driftstab {

void validate(const PlantParams& params) {
  if (!std::isfinite(params.a) || !std::isfinite(params.b) ||
      !std::isfinite(params.noise_std) || !std::isfinite(params.x0)) {
    throw ConfigError("plant: parameters must be finite");
  }
  if (std::fabs(params.a) < 1.0) {
    throw ConfigError("plant.a: |a| >= 1 required, got " +
                      std::to_string(params.a));
  }
  if (params.b == 0.0) {
    throw ConfigError("plant.b: must be nonzero");
  }
  if (params.noise_std <= 0.0) {
    throw ConfigError("plant.noise_std: must be > 0, got " +
                      std::to_string(params.noise_std));
  }
}

double step_plant(const PlantParams& params, double x, double u, double d) {
  return params.a * x + params.b * u + d;
}

double sample_noise(const PlantParams& params, Rng& rng) {
  return params.noise_std * rng.gaussian();
}

}  // namespace driftstab
