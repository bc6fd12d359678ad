#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vibronic/config.hpp"

using namespace vibronic;

namespace {

std::string field_of(auto &&fn)
{
  try {
    fn();
  } catch (ConfigError const &e) {
    return e.field;
  }
  return "<no error>";
}

} // namespace

TEST_SUITE("config")
{
  TEST_CASE("defaults")
  {
    RunConfig const c = default_config();
    CHECK(c.params.eta == 1.0);
    CHECK(c.params.Gamma == 0.1);
    CHECK(c.params.gamma == 0.2);
    CHECK(c.params.m_bar() == 0.05);
    CHECK(c.resolved_cutoff() == 40);
    CHECK(c.engine == Engine::Analytic);
    CHECK(c.kind == SpectrumKind::Absorption);
    auto const f = c.frequency.values();
    CHECK(f.size() == 601);
    CHECK(f.front() == -6.0);
    CHECK(f.back() == 6.0);
    CHECK(f[300] == 0.0);
    auto const t = c.time.values_over_tau();
    CHECK(t.size() == 60);
    CHECK(t.back() == 3.0);
    CHECK_NOTHROW(validate(c));
  }

  TEST_CASE("INI parsing")
  {
    auto const c = parse_ini(R"(
# spectrum parameters
[model]
eta   = 1.5
Gamma = 0.01   ; inline comment
gamma = 0.2
mbar  = 0.25

[cutoff]
N = 48

[spectrum]
kind = emission
min = -4
max = 2
points = 121
normalize = yes
components = n=0,l=-5..1

[dynamics]
initial = excited

[wigner]
times_over_tau = 0, 0.5, 1
step = 0.1

[run]
engine = both
out = results
plots = off
)");
    CHECK(c.params.eta == 1.5);
    CHECK(c.params.Gamma == 0.01);
    CHECK(c.params.m_bar() == 0.25);
    CHECK(c.resolved_cutoff() == 48);
    CHECK(c.kind == SpectrumKind::Emission);
    CHECK(c.frequency.min == -4.0);
    CHECK(c.frequency.points == 121);
    CHECK(c.normalize);
    CHECK(c.components.size() == 7);
    CHECK(c.components.front() == std::pair{0, -5});
    CHECK(c.initial_state().rho_ee == 1.0);
    CHECK(c.wigner_times_over_tau == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(c.phase_space.step == 0.1);
    CHECK(c.engine == Engine::Both);
    CHECK(c.out_dir == "results");
    CHECK_FALSE(c.plots);
  }

  TEST_CASE("JSON parsing matches INI")
  {
    auto const j = parse_json(R"({"model": {"eta": 0.9, "mbar": 1, "Gamma_star": 0.02},
                                  "spectrum": {"normalize": true, "points": 11},
                                  "wigner": {"times_over_tau": [0.25, 0.75]},
                                  "cutoff": {"N": "auto"}})");
    auto const i = parse_ini("[model]\neta=0.9\nmbar=1\nGamma_star=0.02\n[spectrum]\nnormalize=true\npoints=11\n"
                             "[wigner]\ntimes_over_tau=0.25,0.75\n[cutoff]\nN=auto\n");
    CHECK(j.params.eta == i.params.eta);
    CHECK(j.params.m_bar() == i.params.m_bar());
    CHECK(j.params.Gamma_star == 0.02);
    CHECK(j.normalize == i.normalize);
    CHECK(j.frequency.points == i.frequency.points);
    CHECK(j.wigner_times_over_tau == i.wigner_times_over_tau);
    CHECK_FALSE(j.cutoff.has_value());
  }

  TEST_CASE("temperature given as a ratio")
  {
    auto const c = parse_ini("[model]\ntemperature_ratio = 0.6931471805599453\n");
    CHECK(c.params.m_bar() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(field_of([] { parse_ini("[model]\nmbar=1\ntemperature_ratio=1\n"); }) == "model.mbar");
  }

  TEST_CASE("overrides are applied after the file")
  {
    auto const c = parse_ini("[model]\neta = 1.5\n", {"model.eta=0.7", "run.engine=oracle", "cutoff.N=12"});
    CHECK(c.params.eta == 0.7);
    CHECK(c.engine == Engine::Oracle);
    CHECK(c.resolved_cutoff() == 12);
    CHECK(default_config({"verify.fault=flip-w-sign"}).fault_flip_weight_sign);
    CHECK(field_of([] { default_config({"model-eta=1"}); }) == "model-eta=1");
  }

  TEST_CASE("field-level errors")
  {
    CHECK(field_of([] { parse_ini("[model]\nnu = abc\n"); }) == "model.nu");
    CHECK(field_of([] { parse_ini("[model]\ncolour = red\n"); }) == "model.colour");
    CHECK(field_of([] { parse_ini("[spectrum]\npoints = 2.5\n"); }) == "spectrum.points");
    CHECK(field_of([] { parse_ini("[run]\nengine = fast\n"); }) == "run.engine");
    CHECK(field_of([] { parse_ini("[cutoff]\nN = 500\n"); }) == "cutoff.N");
    CHECK(field_of([] { parse_ini("eta = 1\n"); }) == "line 1");
    CHECK(field_of([] { parse_ini("[model\n"); }) == "line 1");
    CHECK(field_of([] { parse_json("[1, 2]"); }) == "json");
    CHECK(field_of([] { parse_json("{\"model\": {\"eta\": [1, 2]}}"); }) == "model.eta");
    CHECK(field_of([] { parse_json("{\"model\": {\"eta\": {\"value\": 1}}}"); }) == "model.eta");

    CHECK(field_of([] { validate(parse_ini("[model]\nnu = -1\n")); }) == "model");
    CHECK(field_of([] { validate(parse_ini("[spectrum]\nmin = 2\nmax = 1\n")); }) == "spectrum.max");
    CHECK(field_of([] { validate(parse_ini("[spectrum]\nkind = emission\n[model]\nGamma = 0\n")); }) == "spectrum.kind");
    CHECK(field_of([] { validate(parse_ini("[wigner]\nstep = 0\n")); }) == "wigner.step");
    CHECK(field_of([] { validate(parse_ini("[dynamics]\ninitial = sideways\n")); }) == "dynamics.initial");
  }

  TEST_CASE("component lists")
  {
    auto const a = parse_components("n=0,l=-5..1");
    CHECK(a.size() == 7);
    CHECK(a.back() == std::pair{0, 1});
    auto const b = parse_components("n=0..2, l=0");
    CHECK(b == std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {2, 0}});
    CHECK_THROWS_AS(parse_components("n=0"), ConfigError);
    CHECK_THROWS_AS(parse_components("n=-1,l=0"), ConfigError);
    CHECK_THROWS_AS(parse_components("n=2..1,l=0"), ConfigError);
    CHECK_THROWS_AS(parse_components("k=1,l=0"), ConfigError);
  }

  TEST_CASE("loading files by extension or content")
  {
    auto const dir = std::filesystem::temp_directory_path() / "vibronic_config_test";
    std::filesystem::create_directories(dir);
    {
      std::ofstream(dir / "a.json") << R"({"model": {"eta": 2}})";
      std::ofstream(dir / "b.conf") << "  {\"model\": {\"eta\": 3}}";
      std::ofstream(dir / "c.ini") << "[model]\neta = 4\n";
    }
    CHECK(load_config(dir / "a.json").params.eta == 2.0);
    CHECK(load_config(dir / "b.conf").params.eta == 3.0);
    CHECK(load_config(dir / "c.ini", {"model.Gamma=0.3"}).params.Gamma == 0.3);
    CHECK(field_of([&] { load_config(dir / "missing.ini"); }) == "config");
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("enum names round-trip")
  {
    for (Engine e : {Engine::Analytic, Engine::Oracle, Engine::Both}) CHECK(engine_from_string(to_string(e)) == e);
    for (SpectrumKind k : {SpectrumKind::Absorption, SpectrumKind::Emission})
      CHECK(spectrum_kind_from_string(to_string(k)) == k);
  }
}
