#pragma once

// Absorption and emission line shapes as sums of complex Lorentzians over the
// coherence branch, per-component traces, and sideband intensities.

#include <map>
#include <utility>
#include <vector>

#include "model.hpp"
#include "oracle.hpp" // SpectrumKind
#include "types.hpp"

namespace vibronic {

struct WeightEntry
{
  int     n, l;
  Complex weight;
};

struct WeightTable
{
  std::vector<WeightEntry> entries;
  Complex                  sum      = 0.0;
  int                      shells   = 0;   // shells of n + |l| enumerated
  double                   last_shell = 0.0; // sum |W| over the final shell
};

struct SpectrumOptions
{
  double tail_tolerance = 1e-12; // stop once a shell's sum |W| drops below this
  int    min_shells     = 4;
  int    max_shells     = 4000;
  bool   normalize      = false; // divide by the sum rule
};

// W_nl (absorption) or W'_nl (emission), enumerated in shells of n + |l|.
WeightTable weight_table(DerivedParams const &d, SpectrumKind kind, SpectrumOptions const &opt = {});

struct SpectrumSeries
{
  SpectrumKind                                      kind = SpectrumKind::Absorption;
  std::vector<double>                               offsets; // omega_probe - omega, units of nu
  std::vector<double>                               total;
  std::map<std::pair<int, int>, std::vector<double>> components;
  DerivedParams                                     params;
  WeightTable                                       weights;
  double                                            normalization = 1.0; // total was divided by this
};

// A(w) = Re sum W_nl / (i w - lambda^-_nl).
SpectrumSeries absorption(std::vector<double> const &offsets, DerivedParams const &d, SpectrumOptions const &opt = {});
// E(w) = (1/Gamma) Re sum W'_nl / (i w - lambda^-_nl); needs Gamma > 0.
SpectrumSeries emission(std::vector<double> const &offsets, DerivedParams const &d, SpectrumOptions const &opt = {});
SpectrumSeries spectrum(SpectrumKind kind, std::vector<double> const &offsets, DerivedParams const &d,
                        SpectrumOptions const &opt = {});

// Individual Re[W / (i w - lambda)] curves for the requested (n, l); `total`
// holds their sum.
SpectrumSeries spectrum_components(SpectrumKind kind, std::vector<double> const &offsets, DerivedParams const &d,
                                   std::vector<std::pair<int, int>> const &which);

struct SidebandIntensity
{
  int    l;
  double value;        // closed form (signed)
  double weight_sum;   // Re sum_n W_nl by direct summation
  bool   negative;     // cos(theta_l) < 0
};

// I_l = exp(-Re beta^2 coth x) I_l(|beta|^2 / sinh x) e^{-l x} cos(theta_l),
// x = hbar nu / 2 k_B T; requires mbar > 0.
double            sideband_intensity(int l, DerivedParams const &d);
// Zero-temperature path Re W_{0,l}.
double            sideband_intensity_zero_temperature(int l, DerivedParams const &d);
SidebandIntensity sideband_report(int l, DerivedParams const &d);

struct Peak
{
  std::size_t index;
  double      offset, value;
};

// Strict interior local maxima, in grid order.
std::vector<Peak> local_maxima(std::vector<double> const &offsets, std::vector<double> const &values);

std::vector<double> linear_grid(double lo, double hi, std::size_t points);

} // namespace vibronic
