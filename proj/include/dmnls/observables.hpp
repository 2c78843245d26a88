#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmnls/grid.hpp"
#include "dmnls/nonlinearity.hpp"

namespace dmnls {

/// Decay rate exponent shared by the energy-norm weight and the scattering fits.
inline constexpr double kRateExponent = 1.0 / 20.0;

/// Share of the domain, at each end, counted as boundary region.
inline constexpr double kBoundaryBand = 0.1;

/// Tolerance of the ||J(t)u|| = ||x f|| cross-check.
inline constexpr double kJIdentityTolerance = 1e-6;

/// A profile f^ at time t, where u(t) = e^{i d_av t Delta} f(t).
struct ProfileView {
  GridPtr grid;
  double t;
  std::span<const cplx> f_hat;
  double d_av = 1.0;
};

struct ObservablesRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double linf_u = 0.0;
  double h1_u = 0.0;
  double h11_u = 0.0;
  std::optional<double> x_d;
  std::optional<double> x_e;
  double j_norm = 0.0;
  double xf_norm = 0.0;
  double boundary_mass_fraction = 0.0;
  std::optional<double> lemma_ratio;

  /// Relative gap between j_norm and xf_norm.
  double j_identity_gap() const;
};

/// u(t) on the position lattice.
std::vector<cplx> reconstruct_u(const ProfileView& p);

/// f(t) on the position lattice.
std::vector<cplx> reconstruct_f(const ProfileView& p);

/// Fraction of the mass of position samples lying within kBoundaryBand * L of either end.
double boundary_mass_fraction(const Grid& grid, std::span<const cplx> u);

/// ||f^||_inf. Throws std::domain_error for t < 1.
double x_d_norm(const ProfileView& p);

struct XeParts {
  double value;   ///< t^{-1/20} (||<d_x> u|| + ||x f||)
  double j_norm;  ///< ||J(t) u|| computed directly
  double xf_norm;
};

/// Energy norm with the J(t) cross-check. Throws std::domain_error for t < 1
/// and std::runtime_error if the two J computations disagree beyond tolerance.
XeParts x_e_norm(const ProfileView& p);

/// (||u(t)||_inf, t^{-1/2} (X_D + X_E)). Throws std::domain_error for t < 1.
std::pair<double, double> pointwise_decay_bound(const ProfileView& p);

/// ||u||_inf / (t^{-1/2} (X_D + X_E)) without the J cross-check; 0 for the zero state.
double lemma_ratio(const ProfileView& p);

/// E = d_av ||d_x u||^2 + (c/2) int ||e^{iD Delta} u||_4^4 dtau.
double energy(const ProfileView& p, AveragedNonlinearity& op);

/// All observables at one snapshot. X-norms and the lemma ratio are filled
/// only for t >= 1; the J cross-check is recorded, not enforced.
ObservablesRecord compute_observables(const ProfileView& p, AveragedNonlinearity& op);

std::string observables_csv(const std::vector<ObservablesRecord>& records);
std::vector<ObservablesRecord> parse_observables_csv(const std::string& text);

}  // namespace dmnls
