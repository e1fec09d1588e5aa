#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace funcdoe {

/// Simulated-annealing schedule.
///
/// The initial temperature is the mean |change| of the objective over
/// `calibration_moves` random moves unless `initial_temperature` is set.
/// Temperature is multiplied by `cooling` after every `inner_moves` proposals.
/// The run stops after `max_temperatures` levels or after
/// `max_stale_temperatures` consecutive levels without a new best.
struct SaConfig {
  double initial_temperature = 0.0;  // <= 0: calibrate from random moves
  double cooling = 0.95;
  int inner_moves = 100;
  int max_temperatures = 200;
  int max_stale_temperatures = 20;
  int calibration_moves = 100;
  int restarts = 1;

  /// Throws ParameterError on out-of-range fields.
  void validate() const;
};

struct AnnealStats {
  double initial_value = 0.0;
  double best_value = 0.0;
  int temperatures = 0;
  long proposals = 0;
  long accepted = 0;
};

using Rng = std::mt19937_64;

/// Rng seeded from a base seed and a stream index, so independent stages and
/// restarts draw from unrelated sequences.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Minimizes problem.value() by Metropolis annealing.
///
/// Problem must provide:
///   double value() const;       current objective
///   double propose(Rng&);       apply a random move, return the new objective
///   void reject();              undo the last proposed move
///   void save_best();           remember the current state as the best
///   void restore_best();        reset to the remembered best state
///
/// On return the problem holds the best state seen. Ties never replace the
/// incumbent best.
template <typename Problem>
AnnealStats anneal(Problem& problem, const SaConfig& config, Rng& rng) {
  config.validate();
  AnnealStats stats;
  double current = problem.value();
  double best = current;
  stats.initial_value = current;
  problem.save_best();

  double temperature = config.initial_temperature;
  if (temperature <= 0.0) {
    double total = 0.0;
    int counted = 0;
    for (int i = 0; i < config.calibration_moves; ++i) {
      const double candidate = problem.propose(rng);
      if (std::isfinite(candidate)) {
        total += std::abs(candidate - current);
        ++counted;
      }
      problem.reject();
    }
    temperature = counted > 0 ? total / counted : 0.0;
    if (!(temperature > 0.0)) temperature = 1e-12 * std::max(1.0, std::abs(current));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int stale = 0;
  for (int level = 0; level < config.max_temperatures && stale < config.max_stale_temperatures;
       ++level) {
    bool improved = false;
    for (int move = 0; move < config.inner_moves; ++move) {
      const double candidate = problem.propose(rng);
      ++stats.proposals;
      const double delta = candidate - current;
      const bool accept =
          std::isfinite(candidate) && (delta <= 0.0 || unit(rng) < std::exp(-delta / temperature));
      if (!accept) {
        problem.reject();
        continue;
      }
      ++stats.accepted;
      current = candidate;
      if (current < best) {
        best = current;
        problem.save_best();
        improved = true;
      }
    }
    ++stats.temperatures;
    stale = improved ? 0 : stale + 1;
    temperature *= config.cooling;
  }
  problem.restore_best();
  stats.best_value = best;
  return stats;
}

}  // namespace funcdoe
