#pragma once

// Invariant measurements shared by `vibronic verify` and the acceptance suite,
// and the versioned JSON report.

#include <string>
#include <vector>

#include "basis.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "oracle.hpp"

namespace vibronic {

inline constexpr int kReportSchemaVersion = 1;

// Largest edge-masked ||L x - lambda x|| / ||x|| over all branches with n <= n_max,
// |l| <= l_max, for the right elements and (Heisenberg action) the left ones.
struct ResidualSummary
{
  double right = 0.0, left = 0.0;
};
ResidualSummary eigen_residuals(DampingBasis const &basis, oracle::SparseSuperoperator const &L, int n_max, int l_max);

// max |Tr[left_a right_b] - delta_ab| over the same index set, all pairs.
double duality_error(DampingBasis const &basis, int n_max, int l_max);

// Closed forms against direct traces on the padded cutoff.
double overlap_AB_error(DampingBasis const &basis, int n_max, int l_max);
double overlap_C_error(DampingBasis const &basis, int n_max, int l_max);

// max |Gamma E(w) - A(2 omega_tilde - w)| on the offsets.
double mirror_error(DerivedParams const &d, std::vector<double> const &offsets);

// max |a - b| / max |b|
double relative_linf(std::vector<double> const &a, std::vector<double> const &b);

struct DynamicsComparison
{
  double tls_error = 0.0; // max abs over rho_ee, rho_gg, rho_ge
  double osc_error = 0.0; // max abs entry of the reduced oscillator state
  double hermiticity = 0.0, trace_error = 0.0, min_eigenvalue = 0.0;
};
DynamicsComparison compare_dynamics(ModelParams const &p, TlsState const &rho0, std::vector<double> const &times,
                                    Index N);

// Relative change of cutoff-sensitive scalars between N and 2N: the captured
// trace of D(beta) mu_th D†(beta) and the oracle absorption at the ZPL and the
// first sidebands (the latter only while 2N is within the oracle cap).
double cutoff_convergence(ModelParams const &p, Index N);

struct Check
{
  std::string name;
  double      value     = 0.0;
  double      tolerance = 0.0;
  bool        pass      = false;
  bool        lower_bound = false; // pass when value >= tolerance instead of value < tolerance
  std::string advisory;
};

struct VerifyReport
{
  std::vector<Check> checks;
  ModelParams        params;
  Index              cutoff = 0;

  bool        pass() const;
  std::string to_json() const;
  std::string to_text() const;
};

VerifyReport run_verify(RunConfig const &config);

} // namespace vibronic
