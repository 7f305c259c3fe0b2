#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predsaddle/types.hpp"

namespace predsaddle {

enum class ExperimentKind { bilinear_orbit, spectral, ode_tracking, theorem_rate, toygan };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

// Flat key = value experiment description. Parsing is strict: unknown keys,
// duplicate keys, malformed values, and keys that do not apply to the chosen
// experiment are all errors carrying the line number. serialize() emits keys
// in a fixed canonical order with shortest round-trip numbers, so
// parse(serialize(c)) == c and equal configs produce identical bytes.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::bilinear_orbit;
  std::string method = "both";  // plain | predict | both
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";

  std::optional<Mat> k_matrix;
  std::optional<double> mu;
  std::optional<double> noise_std;
  std::optional<double> alpha, beta;      // constant schedules
  std::optional<double> c_alpha, c_beta;  // inverse-sqrt schedules
  std::optional<std::string> updater;     // sgd | momentum | adam
  std::optional<double> momentum;
  std::optional<double> learning_rate;
  std::optional<double> adam_beta1, adam_beta2, adam_epsilon;
  std::optional<std::int64_t> n_steps;
  std::optional<std::int64_t> record_every;
  std::optional<Vec> u0, v0;
  std::optional<double> horizon;
  std::optional<std::int64_t> fit_l_min;
  std::optional<std::int64_t> n_modes;
  std::optional<double> radius, sigma;
  std::optional<std::int64_t> batch_size;
  std::optional<std::string> objective;  // saturating | non_saturating
  std::optional<std::int64_t> eval_every, n_probe;
  std::optional<double> threshold_sigmas, min_fraction;
  std::optional<bool> dump_samples;

  // Equality through the canonical serialization.
  bool operator==(const ExperimentConfig& other) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace predsaddle
