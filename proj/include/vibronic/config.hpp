#pragma once

// Run configuration. The native format is INI-like:
//
//   [model]
//   eta = 1.5
//   Gamma = 0.01      # keys are case-sensitive: Gamma and gamma differ
//   mbar = 0.05
//
// with sections model, cutoff, spectrum, dynamics, wigner, run and verify. A JSON
// object with the same sections is accepted as well.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynamics.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "types.hpp"

namespace vibronic {

// Invalid or unknown configuration entry; `field` is "section.key".
struct ConfigError : InvalidParams
{
  ConfigError(std::string field_, std::string const &what) : InvalidParams(field_ + ": " + what), field(std::move(field_)) {}
  std::string field;
};

enum class Engine
{
  Analytic,
  Oracle,
  Both,
};

std::string  to_string(Engine e);
Engine       engine_from_string(std::string const &s);
std::string  to_string(SpectrumKind k);
SpectrumKind spectrum_kind_from_string(std::string const &s);

struct FrequencyGrid
{
  double      min = -6.0, max = 6.0; // omega_probe - omega, units of nu
  std::size_t points = 601;

  std::vector<double> values() const;
};

struct TimeGrid
{
  double      t_max_over_tau = 3.0; // tau = 2 pi / nu
  std::size_t samples        = 60;

  std::vector<double> values_over_tau() const;
};

struct RunConfig
{
  // eta = nu, Gamma = 0.1 nu, gamma = 0.2 nu, mbar = 0.05 unless configured.
  ModelParams params{0.0, 1.0, 1.0, 0.1, 0.2, Occupation::mean_number(0.05), 0.0};

  // Fock cutoff; unset means max(recommended, 40).
  std::optional<Index> cutoff;

  FrequencyGrid                    frequency;
  SpectrumKind                     kind      = SpectrumKind::Absorption;
  bool                             normalize = false;
  std::vector<std::pair<int, int>> components;

  TimeGrid    time;
  std::string initial = "superposition"; // superposition | excited | ground
  double      phase   = 0.0;             // relative phase of the superposition

  std::vector<double> wigner_times_over_tau{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  GridSpec            phase_space;
  std::size_t         trajectory_samples = 200;

  Engine                engine = Engine::Analytic;
  std::filesystem::path out_dir;
  bool                  plots = true;

  bool fault_flip_weight_sign = false; // verify test hook

  Index    resolved_cutoff() const;
  TlsState initial_state() const;
};

// "n=0,l=-5..1" or "n=0..2,l=0"; ranges are inclusive.
std::vector<std::pair<int, int>> parse_components(std::string const &spec);

// Overrides are "section.key=value" strings applied after the file contents.
using Overrides = std::vector<std::string>;

RunConfig parse_ini(std::string_view text, Overrides const &overrides = {});
RunConfig parse_json(std::string_view text, Overrides const &overrides = {});
// JSON when the file ends in .json or its first non-blank character is '{'.
RunConfig load_config(std::filesystem::path const &path, Overrides const &overrides = {});
// Defaults plus overrides, no file.
RunConfig default_config(Overrides const &overrides = {});

// Checks grids, engine-independent invariants and the model parameters.
void validate(RunConfig const &c);

} // namespace vibronic
