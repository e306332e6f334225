#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "fdml/fixture.hpp"
#include "fdml/formation.hpp"
#include "fdml/grid.hpp"

namespace fdml {

// How one box-score statistic responds to the formation cell.
struct TargetEffect {
  double beta_scale = 1.0;  // multiplies true_beta
  double home_advantage = 0.0;
  double strength_effect = 0.0;
  double noise_sd = 1.0;
};

struct SynthConfig {
  int n_teams = 20;
  int n_seasons = 5;
  int n_leagues = 2;
  int k = kGroupCount;
  SquareGrid<double> true_beta;  // antisymmetric, zero diagonal
  double home_advantage = 0.285;
  double strength_effect = 0.3;
  double confounding_strength = 2.0;
  double noise_sd = 0.4;
  bool weather = true;
  std::uint64_t seed = 7;

  void validate() const;  // throws Error(config)
  long fixture_count() const noexcept {
    return static_cast<long>(n_leagues) * n_seasons * n_teams * (n_teams - 1);
  }
  // Goals use (1, home_advantage, strength_effect, noise_sd); the other
  // statistics carry their own scaled effects so every target is exercisable.
  TargetEffect effect(Target target) const;
};

// true_beta with cells in {0, +-0.1, +-0.2, +-0.3}: the more offensive main
// group gains 0.1 * ((j - i) mod 4) over a rival j - i steps more defensive.
SquareGrid<double> demo_true_beta(int k = kGroupCount);
SynthConfig default_synth_config();

struct SynthTruth {
  SquareGrid<double> true_beta;
  double home_advantage = 0;
  std::map<Target, TargetEffect> effects;
};

struct SynthResult {
  std::vector<Fixture> fixtures;
  SynthTruth truth;
};

// Double round-robin seasons. Each team has a latent N(0,1) strength per
// season that drives results; formation choice is a softmax over groups
// tilted by the pre-fixture points-ratio gap between the two teams.
SynthResult generate(const SynthConfig& config, const FormationMapping& mapping = FormationMapping::defaults());

const SquareGrid<double>& oracle_beta(const SynthConfig& config);

void write_truth_file(const std::filesystem::path& path, const SynthTruth& truth);
SynthTruth read_truth_file(const std::filesystem::path& path);

}  // namespace fdml
