// vibronic: closed-form emitter-phonon spectra and dynamics with a brute-force
// Lindblad cross-check.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
// 3 runtime failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vibronic/config.hpp"
#include "vibronic/csv.hpp"
#include "vibronic/dynamics.hpp"
#include "vibronic/fock.hpp"
#include "vibronic/model.hpp"
#include "vibronic/oracle.hpp"
#include "vibronic/plot.hpp"
#include "vibronic/spectra.hpp"
#include "vibronic/verify.hpp"

namespace fs = std::filesystem;
using namespace vibronic;

namespace {

constexpr char const *kOutEnv = "VIBRONIC_OUT_DIR";

fs::path output_dir(RunConfig const &c)
{
  if (!c.out_dir.empty()) return c.out_dir;
  if (char const *env = std::getenv(kOutEnv); env && *env) return env;
  return "vibronic-out";
}

std::string num(double x) { return csv::format_number(x); }

// Short form for plot labels.
std::string label(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void add_param_metadata(csv::Table &t, RunConfig const &c, std::string const &command)
{
  auto const &p = c.params;
  t.metadata = {{"schema_version", std::to_string(kReportSchemaVersion)},
                {"command", command},
                {"omega", num(p.omega)},
                {"nu", num(p.nu)},
                {"eta", num(p.eta)},
                {"Gamma", num(p.Gamma)},
                {"gamma", num(p.gamma)},
                {"mbar", num(p.m_bar())},
                {"Gamma_star", num(p.Gamma_star)},
                {"engine", to_string(c.engine)}};
}

void note_written(fs::path const &p) { std::cout << "wrote " << p.string() << "\n"; }

void save_plot(fs::path const &p, auto const &figure, RunConfig const &c)
{
  if (!c.plots) return;
  if (plot::save(p, figure)) note_written(p);
  else std::cerr << "warning: could not render " << p.string() << "\n";
}

bool uses_oracle(Engine e) { return e != Engine::Analytic; }
bool uses_analytic(Engine e) { return e != Engine::Oracle; }

int cmd_derive(RunConfig const &c)
{
  DerivedParams const d    = derive(c.params);
  Diagnostics const   diag = validate(c.params);
  Index const         N    = c.resolved_cutoff();

  std::printf("%-14s %s\n", "quantity", "value");
  auto row  = [](char const *name, double v) { std::printf("%-14s % .10g\n", name, v); };
  auto crow = [](char const *name, Complex v) { std::printf("%-14s % .10g %+.10gi\n", name, v.real(), v.imag()); };
  row("mbar", d.m_bar);
  crow("beta", d.beta);
  row("|beta|^2", d.beta_abs2);
  row("S", d.huang_rhys);
  row("omega_R", d.omega_R);
  row("omega_tilde", d.omega_tilde);
  row("zpl_shift", d.zpl_shift());
  row("Gamma_tilde", d.Gamma_tilde);
  crow("alpha_plus", d.alpha_plus);
  crow("beta_plus", d.beta_plus);
  crow("alpha_minus", d.alpha_minus);
  crow("beta_minus", d.beta_minus);
  crow("varsigma", d.varsigma);
  std::printf("%-14s %ld\n", "cutoff_N", long(N));
  for (auto const &item : diag.items)
    std::printf("%s: %s (%s)\n", item.severity == Diagnostic::Severity::Info ? "info" : "advisory", item.code.c_str(),
                item.message.c_str());

  auto cplx = [](Complex z) { return nlohmann::ordered_json{{"re", z.real()}, {"im", z.imag()}}; };
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"]        = "derive";
  j["params"]  = {{"omega", c.params.omega}, {"nu", c.params.nu}, {"eta", c.params.eta}, {"Gamma", c.params.Gamma},
                  {"gamma", c.params.gamma}, {"mbar", d.m_bar},   {"Gamma_star", c.params.Gamma_star}};
  j["derived"] = {{"beta", cplx(d.beta)},
                  {"beta_abs2", d.beta_abs2},
                  {"huang_rhys", d.huang_rhys},
                  {"omega_R", d.omega_R},
                  {"omega_tilde", d.omega_tilde},
                  {"zpl_shift", d.zpl_shift()},
                  {"Gamma_tilde", d.Gamma_tilde},
                  {"alpha_plus", cplx(d.alpha_plus)},
                  {"beta_plus", cplx(d.beta_plus)},
                  {"alpha_minus", cplx(d.alpha_minus)},
                  {"beta_minus", cplx(d.beta_minus)},
                  {"varsigma", cplx(d.varsigma)}};
  j["cutoff"]      = N;
  auto &list       = j["diagnostics"] = nlohmann::ordered_json::array();
  for (auto const &item : diag.items)
    list.push_back({{"severity", item.severity == Diagnostic::Severity::Info ? "info" : "advisory"},
                    {"code", item.code},
                    {"message", item.message}});
  fs::path const path = output_dir(c) / "derive.json";
  csv::write_atomic(path, j.dump(2) + "\n");
  note_written(path);
  return 0;
}

int cmd_spectrum(RunConfig const &c)
{
  DerivedParams const d    = derive(c.params);
  auto const          grid = c.frequency.values();
  Index const         N    = c.resolved_cutoff();

  SpectrumOptions opt;
  opt.normalize              = c.normalize;
  SpectrumSeries const exact = spectrum(c.kind, grid, d, opt);

  csv::Table t;
  add_param_metadata(t, c, "spectrum");
  t.metadata.emplace_back("kind", to_string(c.kind));
  t.metadata.emplace_back("normalize", c.normalize ? "true" : "false");
  t.metadata.emplace_back("normalization", num(exact.normalization));
  t.metadata.emplace_back("zpl_shift", num(d.zpl_shift()));
  t.metadata.emplace_back("weight_sum", csv::format_complex(exact.weights.sum.real(), exact.weights.sum.imag()));
  t.metadata.emplace_back("frequency_min", num(c.frequency.min));
  t.metadata.emplace_back("frequency_max", num(c.frequency.max));
  t.metadata.emplace_back("frequency_points", std::to_string(c.frequency.points));
  if (uses_oracle(c.engine)) t.metadata.emplace_back("cutoff", std::to_string(N));

  std::vector<double> oracle_total;
  if (uses_oracle(c.engine)) {
    oracle_total = oracle::correlation_spectrum(c.kind, grid, c.params, N);
    for (double &v : oracle_total) v /= exact.normalization;
  }

  t.add_column("omega_offset", grid);
  t.add_column("total", c.engine == Engine::Oracle ? oracle_total : exact.total);

  plot::LinePlot fig{to_string(c.kind) + " spectrum", "omega_L - omega [nu]", c.normalize ? "normalized" : "intensity",
                     grid, {{"total", t.columns.back(), false}}};

  if (!c.components.empty()) {
    SpectrumSeries comps = spectrum_components(c.kind, grid, d, c.components);
    for (auto const &[nl, curve] : comps.components) {
      std::vector<double> v = curve;
      for (double &x : v) x /= exact.normalization;
      std::string const name = "comp_" + std::to_string(nl.first) + "_" + std::to_string(nl.second);
      t.add_column(name, v);
      fig.series.push_back({name, v, true});
    }
  }
  if (c.engine == Engine::Both) {
    t.add_column("oracle", oracle_total);
    t.footer.push_back("max_relative_error=" + num(relative_linf(exact.total, oracle_total)));
    fig.series.push_back({"oracle", oracle_total, true});
  }

  fs::path const dir  = output_dir(c);
  fs::path const path = dir / ("spectrum_" + to_string(c.kind) + ".csv");
  csv::write(path, t);
  note_written(path);
  save_plot(dir / ("spectrum_" + to_string(c.kind) + ".svg"), fig, c);
  return 0;
}

std::vector<double> times_from(std::vector<double> const &over_tau, double nu)
{
  std::vector<double> t;
  for (double s : over_tau) t.push_back(s * 2.0 * std::numbers::pi / nu);
  return t;
}

int cmd_dynamics(RunConfig const &c)
{
  DerivedParams const d   = derive(c.params);
  auto const          s   = c.time.values_over_tau();
  auto const          ts  = times_from(s, c.params.nu);
  TlsState const      rho = c.initial_state();
  Index const         N   = c.resolved_cutoff();

  std::vector<double> ree, aeg, oree, oaeg;
  if (uses_analytic(c.engine))
    for (double t : ts) {
      TlsState const r = tls_evolve(rho, t, d);
      ree.push_back(r.rho_ee);
      aeg.push_back(std::abs(r.rho_ge));
    }
  if (uses_oracle(c.engine)) {
    auto const L   = oracle::build_liouvillian(c.params, N);
    auto const run = oracle::propagate(L, JointOperator::product(rho.matrix(), fock::thermal_state<double>(d.m_bar, N)), ts);
    for (auto const &state : run.states) {
      auto const m = state.trace_oscillator();
      oree.push_back(m(1, 1).real());
      oaeg.push_back(std::abs(m(0, 1)));
    }
  }

  csv::Table t;
  add_param_metadata(t, c, "dynamics");
  t.metadata.emplace_back("initial", c.initial);
  t.metadata.emplace_back("phase", num(c.phase));
  t.metadata.emplace_back("t_max_over_tau", num(c.time.t_max_over_tau));
  t.metadata.emplace_back("samples", std::to_string(c.time.samples));
  if (uses_oracle(c.engine)) t.metadata.emplace_back("cutoff", std::to_string(N));
  t.add_column("t_over_tau", s);
  t.add_column("rho_ee", c.engine == Engine::Oracle ? oree : ree);
  t.add_column("abs_rho_eg", c.engine == Engine::Oracle ? oaeg : aeg);
  if (c.engine == Engine::Both) {
    t.add_column("oracle_rho_ee", oree);
    t.add_column("oracle_abs_rho_eg", oaeg);
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) err = std::max({err, std::abs(ree[i] - oree[i]), std::abs(aeg[i] - oaeg[i])});
    t.footer.push_back("max_abs_error=" + num(err));
  }

  fs::path const dir  = output_dir(c);
  fs::path const path = dir / "dynamics.csv";
  csv::write(path, t);
  note_written(path);
  save_plot(dir / "dynamics.svg",
            plot::LinePlot{"emitter dynamics", "t / tau", "", s, {{"rho_ee", t.column("rho_ee"), true}, {"|rho_eg|", t.column("abs_rho_eg"), false}}},
            c);
  return 0;
}

int cmd_wigner(RunConfig const &c)
{
  DerivedParams const d   = derive(c.params);
  TlsState const      rho = c.initial_state();
  Index const         N   = c.resolved_cutoff();
  auto const          ts  = times_from(c.wigner_times_over_tau, c.params.nu);
  fs::path const      dir = output_dir(c);

  // Excited-lobe spiral beta - beta(t) over the snapshot range.
  double const        t_end = std::max(ts.back(), 2.0 * std::numbers::pi / c.params.nu);
  std::vector<double> spiral_t;
  for (std::size_t i = 0; i < c.trajectory_samples; ++i)
    spiral_t.push_back(t_end * double(i) / double(std::max<std::size_t>(1, c.trajectory_samples - 1)));
  auto const spiral = beta_trajectory(spiral_t, d);
  {
    csv::Table tr;
    add_param_metadata(tr, c, "wigner-trajectory");
    std::vector<double> s, re, im;
    for (std::size_t i = 0; i < spiral.size(); ++i) {
      s.push_back(spiral_t[i] * c.params.nu / (2.0 * std::numbers::pi));
      re.push_back(spiral[i].real());
      im.push_back(spiral[i].imag());
    }
    tr.add_column("t_over_tau", s);
    tr.add_column("center_re", re);
    tr.add_column("center_im", im);
    csv::write(dir / "wigner_trajectory.csv", tr);
    note_written(dir / "wigner_trajectory.csv");
  }

  std::vector<JointOperator> oracle_states;
  if (uses_oracle(c.engine)) {
    auto const L = oracle::build_liouvillian(c.params, N);
    oracle_states =
        oracle::propagate(L, JointOperator::product(rho.matrix(), fock::thermal_state<double>(d.m_bar, N)), ts).states;
  }

  std::vector<std::pair<double, double>> path;
  for (auto z : spiral) path.emplace_back(z.real(), z.imag());

  for (std::size_t k = 0; k < ts.size(); ++k) {
    double const t = ts[k];
    FockOperator const mu = c.engine == Engine::Oracle ? oracle_states[k].trace_electronic() : osc_evolve(rho, t, d, N);
    FockOperator const excited =
        c.engine == Engine::Oracle
            ? FockOperator(oracle_states[k].ee)
            : FockOperator((rho.rho_ee * std::exp(-c.params.Gamma * t)) * fock::displaced_thermal_block<double>(d.beta - beta_t(t, d), d.m_bar, N));
    PhaseSpaceGrid const g       = wigner(mu, c.phase_space);
    Complex const        lobe    = d.beta - beta_t(t, d);
    Complex              com     = 0.0;
    if (excited.trace().real() > 1e-12) com = wigner(excited, c.phase_space).center_of_mass();

    csv::Table tab;
    add_param_metadata(tab, c, "wigner");
    tab.metadata.emplace_back("t_over_tau", num(c.wigner_times_over_tau[k]));
    tab.metadata.emplace_back("beta", csv::format_complex(d.beta.real(), d.beta.imag()));
    tab.metadata.emplace_back("lobe_center", csv::format_complex(lobe.real(), lobe.imag()));
    tab.metadata.emplace_back("excited_center_of_mass", csv::format_complex(com.real(), com.imag()));
    tab.metadata.emplace_back("grid_step", num(g.step));
    tab.metadata.emplace_back("integral", num(g.integral()));
    tab.metadata.emplace_back("cutoff", std::to_string(N));
    for (auto const &a : g.advisories) std::cerr << "advisory (t/tau=" << c.wigner_times_over_tau[k] << "): " << a << "\n";
    std::vector<double> xs, ps, ws;
    for (std::size_t i = 0; i < g.x.size(); ++i)
      for (std::size_t j = 0; j < g.p.size(); ++j) {
        xs.push_back(g.x[i]);
        ps.push_back(g.p[j]);
        ws.push_back(g.values(Eigen::Index(i), Eigen::Index(j)));
      }
    tab.add_column("x_over_2xi", xs);
    tab.add_column("p_xi_over_hbar", ps);
    tab.add_column("W", ws);
    std::string const stem = "wigner_" + std::to_string(k);
    csv::write(dir / (stem + ".csv"), tab);
    note_written(dir / (stem + ".csv"));
    save_plot(dir / (stem + ".svg"),
              plot::Heatmap{"Wigner function, t/tau = " + label(c.wigner_times_over_tau[k]), "x / 2 xi", "p xi / hbar", g.x,
                            g.p, g.values, path, {{lobe.real(), lobe.imag()}}},
              c);
  }
  return 0;
}

int cmd_verify(RunConfig const &c)
{
  VerifyReport const r = run_verify(c);
  std::cout << r.to_text();
  fs::path const path = output_dir(c) / "verify.json";
  csv::write_atomic(path, r.to_json());
  note_written(path);
  return r.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Closed-form vibronic spectra and dynamics of a damped emitter-phonon system"};
  app.require_subcommand(1);

  std::string              config_path, engine, kind, out, components, fault;
  std::vector<std::string> overrides;
  bool                     normalize = false, no_plots = false;
  long                     cutoff = 0;

  struct Command
  {
    char const *name, *help;
    int (*run)(RunConfig const &);
  };
  Command const commands[] = {
      {"derive", "print derived parameters and regime diagnostics", cmd_derive},
      {"spectrum", "absorption or emission spectrum as CSV", cmd_spectrum},
      {"dynamics", "emitter population and coherence versus time", cmd_dynamics},
      {"wigner", "phase-space snapshots of the phonon mode", cmd_wigner},
      {"verify", "run the invariant suite against the oracle", cmd_verify},
  };
  for (auto const &cmd : commands) {
    CLI::App *sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "INI or JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--engine", engine, "analytic, oracle or both")->check(CLI::IsMember({"analytic", "oracle", "both"}));
    sub->add_option("--kind", kind, "absorption or emission")->check(CLI::IsMember({"absorption", "emission"}));
    sub->add_flag("--normalize", normalize, "divide spectra by the sum rule");
    sub->add_option("--out", out, std::string("output directory (default $") + kOutEnv + " or ./vibronic-out)");
    sub->add_option("--components", components, "spectral components, e.g. n=0,l=-5..1");
    sub->add_option("--cutoff", cutoff, "Fock cutoff N");
    sub->add_option("--set", overrides, "override a config entry, section.key=value");
    sub->add_flag("--no-plots", no_plots, "skip SVG output");
    sub->add_option("--fault", fault, "fault injection for verify")->check(CLI::IsMember({"none", "flip-w-sign"}))->group("");
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const &e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const &e) {
    return app.exit(e);
  } catch (CLI::ParseError const &e) {
    app.exit(e);
    return 2;
  }

  Overrides all = overrides;
  if (!engine.empty()) all.push_back("run.engine=" + engine);
  if (!kind.empty()) all.push_back("spectrum.kind=" + kind);
  if (normalize) all.push_back("spectrum.normalize=true");
  if (!out.empty()) all.push_back("run.out=" + out);
  if (!components.empty()) all.push_back("spectrum.components=" + components);
  if (cutoff != 0) all.push_back("cutoff.N=" + std::to_string(cutoff));
  if (no_plots) all.push_back("run.plots=false");
  if (!fault.empty()) all.push_back("verify.fault=" + fault);

  RunConfig config;
  try {
    config = config_path.empty() ? default_config(all) : load_config(config_path, all);
  } catch (InvalidParams const &e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }

  for (auto const &cmd : commands) {
    if (!app.got_subcommand(cmd.name)) continue;
    try {
      return cmd.run(config);
    } catch (InvalidParams const &e) {
      std::cerr << "invalid config: " << e.what() << "\n";
      return 2;
    } catch (std::exception const &e) {
      std::cerr << cmd.name << " failed: " << e.what() << "\n";
      return 3;
    }
  }
  return 3;
}
