#include "vibronic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "vibronic/fock.hpp"
#include "vibronic/spectra.hpp"

namespace vibronic {

namespace {

constexpr Branch kBranches[] = {Branch::Population, Branch::CoherencePlus, Branch::CoherenceMinus, Branch::Decay};

struct Label
{
  Branch b;
  int    n, l;
};

std::vector<Label> labels(int n_max, int l_max)
{
  std::vector<Label> out;
  for (Branch b : kBranches)
    for (int n = 0; n <= n_max; ++n)
      for (int l = -l_max; l <= l_max; ++l) out.push_back({b, n, l});
  return out;
}

} // namespace

ResidualSummary eigen_residuals(DampingBasis const &basis, oracle::SparseSuperoperator const &L, int n_max, int l_max)
{
  ResidualSummary r;
  for (auto const &[b, n, l] : labels(n_max, l_max)) {
    auto const    e  = basis.entry(b, n, l);
    JointOperator rr = oracle::apply(L, e->right) - e->eigenvalue * e->right;
    JointOperator rl = oracle::apply_left(L, e->left) - e->eigenvalue * e->left;
    r.right = std::max(r.right, rr.masked_norm() / e->right.masked_norm());
    r.left  = std::max(r.left, rl.masked_norm() / e->left.masked_norm());
  }
  return r;
}

double duality_error(DampingBasis const &basis, int n_max, int l_max)
{
  auto const all = labels(n_max, l_max);
  double     err = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto const &left = basis.left(all[i].b, all[i].n, all[i].l);
    for (std::size_t j = 0; j < all.size(); ++j) {
      Complex const v = dual_pair(left, basis.right(all[j].b, all[j].n, all[j].l));
      err             = std::max(err, std::abs(v - (i == j ? 1.0 : 0.0)));
    }
  }
  return err;
}

double overlap_AB_error(DampingBasis const &basis, int n_max, int l_max)
{
  DerivedParams const &d   = basis.params();
  double               err = 0.0;
  for (int n = 0; n <= n_max; ++n)
    for (int l = -l_max; l <= l_max; ++l)
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        err = std::max(err, std::abs(overlap_A(n, l, s, d) - basis.trace_A(n, l, s)));
        err = std::max(err, std::abs(overlap_B(n, l, s, d) - basis.trace_B(n, l, s)));
      }
  return err;
}

double overlap_C_error(DampingBasis const &basis, int n_max, int l_max)
{
  DerivedParams const &d   = basis.params();
  double               err = 0.0;
  for (int n = 0; n <= n_max; ++n)
    for (int l = -l_max; l <= l_max; ++l)
      for (int m = 0; m <= n_max; ++m)
        for (int k = -l_max; k <= l_max; ++k)
          err = std::max(err, std::abs(overlap_C(n, l, m, k, d) - basis.trace_C(n, l, m, k)));
  return err;
}

double mirror_error(DerivedParams const &d, std::vector<double> const &offsets)
{
  // A(2 omega_tilde - w_p) in offset units is 2 (omega_tilde - omega) - offset.
  std::vector<double> mirrored(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) mirrored[i] = 2.0 * d.zpl_shift() - offsets[i];
  auto const E = emission(offsets, d);
  auto const A = absorption(mirrored, d);
  double     err = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i)
    err = std::max(err, std::abs(d.params.Gamma * E.total[i] - A.total[i]));
  return err;
}

double relative_linf(std::vector<double> const &a, std::vector<double> const &b)
{
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("relative_linf: size mismatch");
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff  = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

DynamicsComparison compare_dynamics(ModelParams const &p, TlsState const &rho0, std::vector<double> const &times,
                                    Index N)
{
  DerivedParams const d   = derive(p);
  auto const          L   = oracle::build_liouvillian(p, N);
  JointOperator const J0  = JointOperator::product(rho0.matrix(), fock::thermal_state<double>(d.m_bar, N));
  auto const          run = oracle::propagate(L, J0, times);

  DynamicsComparison c;
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto const &state = run.states[i];
    TlsState const tls = tls_evolve(rho0, times[i], d);
    auto const     tr  = state.trace_oscillator();
    c.tls_error = std::max({c.tls_error, std::abs(tls.rho_ee - tr(1, 1).real()), std::abs(tls.rho_gg - tr(0, 0).real()),
                            std::abs(tls.rho_ge - tr(0, 1))});
    FockOperator const mu = osc_evolve(rho0, times[i], d, N);
    c.osc_error           = std::max(c.osc_error, (mu - state.trace_electronic()).cwiseAbs().maxCoeff());
    auto const h          = oracle::hygiene(state);
    c.hermiticity         = std::max(c.hermiticity, h.hermiticity);
    c.trace_error         = std::max(c.trace_error, h.trace_error);
    c.min_eigenvalue      = std::min(c.min_eigenvalue, h.min_eigenvalue);
  }
  return c;
}

double cutoff_convergence(ModelParams const &p, Index N)
{
  DerivedParams const d = derive(p);
  auto trace_at = [&](Index M) { return fock::displaced_thermal_block<double>(d.beta, d.m_bar, M).trace().real(); };
  double const t1 = trace_at(N), t2 = trace_at(2 * N);
  double       change = std::abs(t2 - t1) / std::abs(t2);
  if (2 * N <= oracle::kMaxCutoff && d.Gamma_tilde > 0.0) {
    std::vector<double> const spots{d.zpl_shift(), d.zpl_shift() + 1.0, d.zpl_shift() + 2.0};
    auto const                a = oracle::correlation_spectrum(SpectrumKind::Absorption, spots, p, N);
    auto const                b = oracle::correlation_spectrum(SpectrumKind::Absorption, spots, p, 2 * N);
    for (std::size_t i = 0; i < spots.size(); ++i) change = std::max(change, std::abs(a[i] - b[i]) / std::abs(b[i]));
  }
  return change;
}

bool VerifyReport::pass() const
{
  return std::all_of(checks.begin(), checks.end(), [](Check const &c) { return c.pass; });
}

std::string VerifyReport::to_json() const
{
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"]        = "verify";
  j["cutoff"]         = cutoff;
  j["params"]         = {{"omega", params.omega}, {"nu", params.nu},       {"eta", params.eta},
                         {"Gamma", params.Gamma}, {"gamma", params.gamma}, {"mbar", params.m_bar()},
                         {"Gamma_star", params.Gamma_star}};
  j["pass"]           = pass();
  auto &list          = j["checks"] = nlohmann::ordered_json::array();
  for (auto const &c : checks) {
    nlohmann::ordered_json e{{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance},
                             {"comparison", c.lower_bound ? ">=" : "<"}, {"pass", c.pass}};
    if (!c.advisory.empty()) e["advisory"] = c.advisory;
    list.push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string VerifyReport::to_text() const
{
  std::string out;
  char        line[256];
  for (auto const &c : checks) {
    std::snprintf(line, sizeof line, "%-4s %-28s %12.3e  %s %.1e\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value,
                  c.lower_bound ? ">=" : "<", c.tolerance);
    out += line;
    if (!c.pass && !c.advisory.empty()) out += "     advisory: " + c.advisory + "\n";
  }
  out += pass() ? "all checks passed\n" : "verification FAILED\n";
  return out;
}

VerifyReport run_verify(RunConfig const &config)
{
  VerifyReport r;
  r.params = config.params;
  r.cutoff = config.resolved_cutoff();
  Index const         N = r.cutoff;
  DerivedParams const d = derive(config.params);

  auto add = [&](std::string name, double value, double tol, std::string advisory = {}) {
    bool const ok = std::isfinite(value) && value < tol;
    r.checks.push_back({std::move(name), value, tol, ok, false, std::move(advisory)});
  };
  std::string const raise = "raise cutoff.N (try " + std::to_string(2 * N) + ")";

  add("cutoff_convergence_2N", cutoff_convergence(config.params, N), 1e-8, raise);

  auto const   L = oracle::build_liouvillian(config.params, N);
  DampingBasis basis(d, N);
  auto const   res = eigen_residuals(basis, L, 3, 3);
  add("eigen_residual_right", res.right, 1e-7, raise);
  add("eigen_residual_left", res.left, 1e-7, raise);
  add("duality", duality_error(basis, 3, 3), 1e-7, raise);
  add("overlap_A_B_vs_trace", overlap_AB_error(basis, 3, 3), 1e-8);
  add("overlap_C_vs_trace", overlap_C_error(basis, 3, 3), 1e-8);

  double const sign = config.fault_flip_weight_sign ? -1.0 : 1.0;
  add("weight_sum_rule", std::abs(sign * weight_table(d, SpectrumKind::Absorption).sum - 1.0), 1e-8);
  if (d.params.Gamma > 0.0) add("mirror_identity", mirror_error(d, config.frequency.values()), 1e-10);

  auto const grid     = config.frequency.values();
  auto       analytic = absorption(grid, d).total;
  for (double &v : analytic) v *= sign;
  add("absorption_vs_oracle", relative_linf(analytic, oracle::correlation_spectrum(SpectrumKind::Absorption, grid, config.params, N)),
      1e-3, raise);

  add("trace_preservation", oracle::trace_preservation_residual(L, 2 * (N + 1)), 1e-12);
  JointOperator const expected = JointOperator::product(Eigen::Matrix2cd{{1.0, 0.0}, {0.0, 0.0}},
                                                        fock::thermal_state<double>(d.m_bar, N));
  add("steady_state", (oracle::steady_state(L, N) - expected).dense().cwiseAbs().maxCoeff(), 1e-9);

  double const        tau = 2.0 * std::numbers::pi / config.params.nu;
  std::vector<double> times;
  for (double s : config.time.values_over_tau()) times.push_back(s * tau);
  auto const dyn = compare_dynamics(config.params, config.initial_state(), times, N);
  add("tls_evolve_vs_oracle", dyn.tls_error, 1e-6, raise);
  add("osc_evolve_vs_oracle", dyn.osc_error, 1e-6, raise);
  add("propagation_hermiticity", dyn.hermiticity, 1e-10);
  add("propagation_trace", dyn.trace_error, 1e-10);
  r.checks.push_back({"propagation_min_eigenvalue", dyn.min_eigenvalue, -1e-8, dyn.min_eigenvalue >= -1e-8, true, {}});
  return r;
}

} // namespace vibronic
