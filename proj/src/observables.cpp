#include "dmnls/observables.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dmnls/propagator.hpp"
#include "dmnls/text_io.hpp"

namespace dmnls {

namespace {

void require_late(const ProfileView& p, const char* what) {
  if (!(p.t >= 1.0))
    throw std::domain_error(std::string(what) + ": defined for t >= 1 only (t=" + format_double(p.t) + ")");
}

double h1_from_profile(const ProfileView& p) {
  const auto xi = p.grid->xi();
  double s = 0.0;
  for (std::size_t i = 0; i < p.f_hat.size(); ++i) s += (1.0 + xi[i] * xi[i]) * std::norm(p.f_hat[i]);
  return std::sqrt(s * p.grid->dxi());
}

double weighted_l2(const Grid& g, std::span<const cplx> v) {
  const auto x = g.x();
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) s += x[j] * x[j] * std::norm(v[j]);
  return std::sqrt(s * g.dx());
}

std::vector<cplx> free_phase(const ProfileView& p, double sign) {
  std::vector<cplx> out(p.f_hat.size());
  const auto xi = p.grid->xi();
  const double s = sign * p.d_av * p.t;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.f_hat[i] * std::polar(1.0, -s * xi[i] * xi[i]);
  return out;
}

double j_direct(const ProfileView& p, std::span<const cplx> u) {
  const Field uf(p.grid, {u.begin(), u.end()}, Space::position);
  return norm(galilean_J(uf, p.d_av * p.t), NormKind::L2);
}

}  // namespace

double ObservablesRecord::j_identity_gap() const {
  const double scale = std::max(j_norm, xf_norm);
  return scale == 0.0 ? 0.0 : std::abs(j_norm - xf_norm) / scale;
}

std::vector<cplx> reconstruct_u(const ProfileView& p) {
  auto u = free_phase(p, 1.0);
  p.grid->to_position(u, u);
  return u;
}

std::vector<cplx> reconstruct_f(const ProfileView& p) {
  std::vector<cplx> f(p.f_hat.begin(), p.f_hat.end());
  p.grid->to_position(f, f);
  return f;
}

double boundary_mass_fraction(const Grid& grid, std::span<const cplx> u) {
  const auto x = grid.x();
  const double edge = (0.5 - kBoundaryBand) * grid.length();
  double total = 0.0, outer = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double m = std::norm(u[j]);
    total += m;
    if (std::abs(x[j]) > edge) outer += m;
  }
  return total == 0.0 ? 0.0 : outer / total;
}

double x_d_norm(const ProfileView& p) {
  require_late(p, "x_d_norm");
  return sup_norm(p.f_hat);
}

XeParts x_e_norm(const ProfileView& p) {
  require_late(p, "x_e_norm");
  const auto u = reconstruct_u(p);
  const auto f = reconstruct_f(p);
  XeParts r{};
  r.xf_norm = weighted_l2(*p.grid, f);
  r.j_norm = j_direct(p, u);
  r.value = std::pow(p.t, -kRateExponent) * (h1_from_profile(p) + r.xf_norm);
  const double scale = std::max(r.j_norm, r.xf_norm);
  if (scale > 0.0 && std::abs(r.j_norm - r.xf_norm) > kJIdentityTolerance * scale)
    throw std::runtime_error("x_e_norm: ||J(t)u||=" + format_double(r.j_norm) + " and ||x f||=" +
                             format_double(r.xf_norm) + " disagree at t=" + format_double(p.t));
  return r;
}

std::pair<double, double> pointwise_decay_bound(const ProfileView& p) {
  const double xd = x_d_norm(p);
  const double xe = x_e_norm(p).value;
  return {sup_norm(reconstruct_u(p)), std::pow(p.t, -0.5) * (xd + xe)};
}

double lemma_ratio(const ProfileView& p) {
  require_late(p, "lemma_ratio");
  const double xd = sup_norm(p.f_hat);
  const double xe = std::pow(p.t, -kRateExponent) * (h1_from_profile(p) + weighted_l2(*p.grid, reconstruct_f(p)));
  const double rhs = std::pow(p.t, -0.5) * (xd + xe);
  return rhs == 0.0 ? 0.0 : sup_norm(reconstruct_u(p)) / rhs;
}

double energy(const ProfileView& p, AveragedNonlinearity& op) {
  const auto xi = p.grid->xi();
  double kinetic = 0.0;
  for (std::size_t i = 0; i < p.f_hat.size(); ++i) kinetic += xi[i] * xi[i] * std::norm(p.f_hat[i]);
  kinetic *= p.grid->dxi();
  const auto u_hat = free_phase(p, 1.0);
  return p.d_av * kinetic + 0.5 * op.c() * op.quartic_average(u_hat);
}

ObservablesRecord compute_observables(const ProfileView& p, AveragedNonlinearity& op) {
  ObservablesRecord r;
  r.t = p.t;
  const double l2 = l2_norm(*p.grid, p.f_hat, Space::frequency);
  r.mass = l2 * l2;
  r.energy = energy(p, op);
  const auto u = reconstruct_u(p);
  const auto f = reconstruct_f(p);
  r.linf_u = sup_norm(u);
  r.h1_u = h1_from_profile(p);
  r.h11_u = r.h1_u + weighted_l2(*p.grid, u);
  r.xf_norm = weighted_l2(*p.grid, f);
  r.j_norm = j_direct(p, u);
  r.boundary_mass_fraction = boundary_mass_fraction(*p.grid, u);
  if (p.t >= 1.0) {
    r.x_d = sup_norm(p.f_hat);
    r.x_e = std::pow(p.t, -kRateExponent) * (r.h1_u + r.xf_norm);
    const double rhs = std::pow(p.t, -0.5) * (*r.x_d + *r.x_e);
    r.lemma_ratio = rhs == 0.0 ? 0.0 : r.linf_u / rhs;
  }
  return r;
}

namespace {

const char* kColumns =
    "t,mass,energy,linf_u,h1_u,h11_u,x_d,x_e,j_norm,xf_norm,boundary_mass_fraction,lemma_ratio";

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> parse_opt(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

std::string observables_csv(const std::vector<ObservablesRecord>& records) {
  std::ostringstream os;
  os << kColumns << '\n';
  for (const auto& r : records) {
    os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.energy) << ','
       << format_double(r.linf_u) << ',' << format_double(r.h1_u) << ',' << format_double(r.h11_u)
       << ',' << opt(r.x_d) << ',' << opt(r.x_e) << ',' << format_double(r.j_norm) << ','
       << format_double(r.xf_norm) << ',' << format_double(r.boundary_mass_fraction) << ','
       << opt(r.lemma_ratio) << '\n';
  }
  return os.str();
}

std::vector<ObservablesRecord> parse_observables_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || trim(line) != kColumns)
    throw std::runtime_error("observables.csv: unexpected header");
  std::vector<ObservablesRecord> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 12) throw std::runtime_error("observables.csv: expected 12 columns");
    ObservablesRecord r;
    r.t = parse_double(cells[0]);
    r.mass = parse_double(cells[1]);
    r.energy = parse_double(cells[2]);
    r.linf_u = parse_double(cells[3]);
    r.h1_u = parse_double(cells[4]);
    r.h11_u = parse_double(cells[5]);
    r.x_d = parse_opt(cells[6]);
    r.x_e = parse_opt(cells[7]);
    r.j_norm = parse_double(cells[8]);
    r.xf_norm = parse_double(cells[9]);
    r.boundary_mass_fraction = parse_double(cells[10]);
    r.lemma_ratio = parse_opt(cells[11]);
    out.push_back(r);
  }
  return out;
}

}  // namespace dmnls
