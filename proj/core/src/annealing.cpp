#include "funcdoe/annealing.hpp"

#include "funcdoe/error.hpp"

namespace funcdoe {

void SaConfig::validate() const {
  if (!(cooling > 0.0 && cooling < 1.0)) throw ParameterError("cooling factor must lie in (0,1)");
  if (inner_moves < 1) throw ParameterError("inner_moves must be positive");
  if (max_temperatures < 1) throw ParameterError("max_temperatures must be positive");
  if (max_stale_temperatures < 1) throw ParameterError("max_stale_temperatures must be positive");
  if (calibration_moves < 1) throw ParameterError("calibration_moves must be positive");
  if (restarts < 1) throw ParameterError("restarts must be positive");
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(stream),
                         static_cast<std::uint32_t>(stream >> 32)};
  return Rng(sequence);
}

}  // namespace funcdoe
