#include "vibronic/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vibronic/fock.hpp"

namespace vibronic {

std::string to_string(Engine e)
{
  switch (e) {
  case Engine::Analytic: return "analytic";
  case Engine::Oracle: return "oracle";
  case Engine::Both: return "both";
  }
  return "analytic";
}

Engine engine_from_string(std::string const &s)
{
  if (s == "analytic") return Engine::Analytic;
  if (s == "oracle") return Engine::Oracle;
  if (s == "both") return Engine::Both;
  throw ConfigError("run.engine", "expected analytic, oracle or both, got '" + s + "'");
}

std::string to_string(SpectrumKind k) { return k == SpectrumKind::Absorption ? "absorption" : "emission"; }

SpectrumKind spectrum_kind_from_string(std::string const &s)
{
  if (s == "absorption") return SpectrumKind::Absorption;
  if (s == "emission") return SpectrumKind::Emission;
  throw ConfigError("spectrum.kind", "expected absorption or emission, got '" + s + "'");
}

std::vector<double> FrequencyGrid::values() const
{
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = points == 1 ? min : min + (max - min) * double(i) / double(points - 1);
  return g;
}

std::vector<double> TimeGrid::values_over_tau() const
{
  std::vector<double> g(samples);
  for (std::size_t i = 0; i < samples; ++i)
    g[i] = samples == 1 ? 0.0 : t_max_over_tau * double(i) / double(samples - 1);
  return g;
}

Index RunConfig::resolved_cutoff() const
{
  if (cutoff) return *cutoff;
  DerivedParams const d = derive(params);
  return std::max<Index>(fock::Cutoff::recommended(d.beta_abs2, d.m_bar).N, 40);
}

TlsState RunConfig::initial_state() const
{
  if (initial == "superposition") return TlsState::equal_superposition(phase);
  if (initial == "excited") return {0.0, 1.0, 0.0};
  if (initial == "ground") return {1.0, 0.0, 0.0};
  throw ConfigError("dynamics.initial", "expected superposition, excited or ground, got '" + initial + "'");
}

namespace {

std::string trim(std::string_view s)
{
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto const e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string const &s, char sep)
{
  std::vector<std::string> out;
  std::string              item;
  std::istringstream       in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(std::string const &field, std::string const &v)
{
  double x = 0.0;
  auto const *first = v.data(), *last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  auto const [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || v.empty()) throw ConfigError(field, "expected a number, got '" + v + "'");
  return x;
}

long to_integer(std::string const &field, std::string const &v)
{
  long x = 0;
  auto const [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(field, "expected an integer, got '" + v + "'");
  return x;
}

std::size_t to_count(std::string const &field, std::string const &v)
{
  long const x = to_integer(field, v);
  if (x < 1) throw ConfigError(field, "must be at least 1");
  return std::size_t(x);
}

bool to_bool(std::string const &field, std::string v)
{
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(field, "expected a boolean, got '" + v + "'");
}

std::pair<int, int> to_range(std::string const &field, std::string const &v)
{
  if (auto const dots = v.find(".."); dots != std::string::npos) {
    int const a = int(to_integer(field, trim(v.substr(0, dots))));
    int const b = int(to_integer(field, trim(v.substr(dots + 2))));
    if (b < a) throw ConfigError(field, "empty range '" + v + "'");
    return {a, b};
  }
  int const a = int(to_integer(field, v));
  return {a, a};
}

// Flattened "section.key" -> value, in file order.
using Entries = std::vector<std::pair<std::string, std::string>>;

RunConfig from_entries(Entries const &entries)
{
  RunConfig c;
  bool      have_mbar = false, have_x = false;
  for (auto const &[field, v] : entries) {
    if (field == "model.omega") c.params.omega = to_double(field, v);
    else if (field == "model.nu") c.params.nu = to_double(field, v);
    else if (field == "model.eta") c.params.eta = to_double(field, v);
    else if (field == "model.Gamma") c.params.Gamma = to_double(field, v);
    else if (field == "model.gamma") c.params.gamma = to_double(field, v);
    else if (field == "model.Gamma_star") c.params.Gamma_star = to_double(field, v);
    else if (field == "model.mbar") {
      c.params.occupation = Occupation::mean_number(to_double(field, v));
      have_mbar           = true;
    } else if (field == "model.temperature_ratio") {
      c.params.occupation = Occupation::temperature_ratio(to_double(field, v));
      have_x              = true;
    } else if (field == "cutoff.N") {
      if (v == "auto") c.cutoff.reset();
      else {
        long const N = to_integer(field, v);
        if (N < 1 || N > oracle::kMaxCutoff)
          throw ConfigError(field, "must lie in [1, " + std::to_string(oracle::kMaxCutoff) + "]");
        c.cutoff = Index(N);
      }
    } else if (field == "spectrum.kind") c.kind = spectrum_kind_from_string(v);
    else if (field == "spectrum.min") c.frequency.min = to_double(field, v);
    else if (field == "spectrum.max") c.frequency.max = to_double(field, v);
    else if (field == "spectrum.points") c.frequency.points = to_count(field, v);
    else if (field == "spectrum.normalize") c.normalize = to_bool(field, v);
    else if (field == "spectrum.components") c.components = v.empty() ? decltype(c.components){} : parse_components(v);
    else if (field == "dynamics.t_max_over_tau") c.time.t_max_over_tau = to_double(field, v);
    else if (field == "dynamics.samples") c.time.samples = to_count(field, v);
    else if (field == "dynamics.initial") c.initial = v;
    else if (field == "dynamics.phase") c.phase = to_double(field, v);
    else if (field == "wigner.times_over_tau") {
      c.wigner_times_over_tau.clear();
      for (auto const &item : split(v, ',')) c.wigner_times_over_tau.push_back(to_double(field, item));
    } else if (field == "wigner.x_min") c.phase_space.x_min = to_double(field, v);
    else if (field == "wigner.x_max") c.phase_space.x_max = to_double(field, v);
    else if (field == "wigner.p_min") c.phase_space.p_min = to_double(field, v);
    else if (field == "wigner.p_max") c.phase_space.p_max = to_double(field, v);
    else if (field == "wigner.step") c.phase_space.step = to_double(field, v);
    else if (field == "wigner.trajectory_samples") c.trajectory_samples = to_count(field, v);
    else if (field == "run.engine") c.engine = engine_from_string(v);
    else if (field == "run.out") c.out_dir = v;
    else if (field == "run.plots") c.plots = to_bool(field, v);
    else if (field == "verify.fault") {
      if (v == "none") c.fault_flip_weight_sign = false;
      else if (v == "flip-w-sign") c.fault_flip_weight_sign = true;
      else throw ConfigError(field, "expected none or flip-w-sign, got '" + v + "'");
    } else
      throw ConfigError(field, "unknown key");
  }
  if (have_mbar && have_x) throw ConfigError("model.mbar", "give either mbar or temperature_ratio, not both");
  validate(c);
  return c;
}

} // namespace

std::vector<std::pair<int, int>> parse_components(std::string const &spec)
{
  std::pair<int, int> n{0, 0}, l{0, 0};
  bool                have_n = false, have_l = false;
  for (auto const &part : split(spec, ',')) {
    auto const eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("spectrum.components", "expected n=..,l=.., got '" + spec + "'");
    std::string const key = trim(part.substr(0, eq)), val = trim(part.substr(eq + 1));
    if (key == "n") {
      n      = to_range("spectrum.components", val);
      have_n = true;
    } else if (key == "l") {
      l      = to_range("spectrum.components", val);
      have_l = true;
    } else
      throw ConfigError("spectrum.components", "unknown index '" + key + "'");
  }
  if (!have_n || !have_l) throw ConfigError("spectrum.components", "both n and l are required");
  if (n.first < 0) throw ConfigError("spectrum.components", "n must be non-negative");
  std::vector<std::pair<int, int>> out;
  for (int a = n.first; a <= n.second; ++a)
    for (int b = l.first; b <= l.second; ++b) out.emplace_back(a, b);
  return out;
}

namespace {

Entries with_overrides(Entries entries, Overrides const &overrides)
{
  for (auto const &o : overrides) {
    auto const eq = o.find('=');
    if (eq == std::string::npos || o.find('.') > eq) throw ConfigError(o, "override must look like section.key=value");
    entries.emplace_back(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  return entries;
}

} // namespace

RunConfig default_config(Overrides const &overrides) { return from_entries(with_overrides({}, overrides)); }

RunConfig parse_ini(std::string_view text, Overrides const &overrides)
{
  Entries            entries;
  std::string        section, line;
  std::istringstream in{std::string(text)};
  int                lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto const hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    std::string const s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    auto const eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno), "key outside of a section");
    entries.emplace_back(section + "." + trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return from_entries(with_overrides(std::move(entries), overrides));
}

RunConfig parse_json(std::string_view text, Overrides const &overrides)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (nlohmann::json::parse_error const &e) {
    throw ConfigError("json", e.what());
  }
  if (!j.is_object()) throw ConfigError("json", "top level must be an object");
  auto scalar = [](std::string const &field, nlohmann::json const &v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    if (v.is_null()) return "none";
    throw ConfigError(field, "expected a scalar");
  };
  Entries entries;
  for (auto const &[section, body] : j.items()) {
    if (!body.is_object()) throw ConfigError(section, "section must be an object");
    for (auto const &[key, v] : body.items()) {
      std::string const field = section + "." + key;
      if (v.is_array()) {
        std::string joined;
        for (auto const &item : v) joined += (joined.empty() ? "" : ",") + scalar(field, item);
        entries.emplace_back(field, joined);
      } else
        entries.emplace_back(field, scalar(field, v));
    }
  }
  return from_entries(with_overrides(std::move(entries), overrides));
}

RunConfig load_config(std::filesystem::path const &path, Overrides const &overrides)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string const text  = ss.str();
  auto const        first = text.find_first_not_of(" \t\r\n");
  if (path.extension() == ".json" || (first != std::string::npos && text[first] == '{')) return parse_json(text, overrides);
  return parse_ini(text, overrides);
}

void validate(RunConfig const &c)
{
  Diagnostics const diag = validate(c.params);
  for (auto const &item : diag.items)
    if (item.severity == Diagnostic::Severity::Error) throw ConfigError("model", item.code + ": " + item.message);
  if (!(c.frequency.max > c.frequency.min) || !std::isfinite(c.frequency.min) || !std::isfinite(c.frequency.max))
    throw ConfigError("spectrum.max", "frequency grid must be increasing");
  if (c.frequency.points < 2) throw ConfigError("spectrum.points", "need at least 2 points");
  if (!(c.time.t_max_over_tau > 0.0) || !std::isfinite(c.time.t_max_over_tau))
    throw ConfigError("dynamics.t_max_over_tau", "must be positive");
  if (c.wigner_times_over_tau.empty()) throw ConfigError("wigner.times_over_tau", "need at least one time");
  for (double t : c.wigner_times_over_tau)
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("wigner.times_over_tau", "times must be non-negative");
  auto const &g = c.phase_space;
  if (!(g.x_max > g.x_min) || !(g.p_max > g.p_min)) throw ConfigError("wigner.x_max", "phase-space window is empty");
  if (!(g.step > 0.0)) throw ConfigError("wigner.step", "must be positive");
  if (c.initial != "superposition" && c.initial != "excited" && c.initial != "ground")
    throw ConfigError("dynamics.initial", "expected superposition, excited or ground, got '" + c.initial + "'");
  if (c.kind == SpectrumKind::Emission && !(c.params.Gamma > 0.0))
    throw ConfigError("spectrum.kind", "emission needs Gamma > 0");
}

} // namespace vibronic
