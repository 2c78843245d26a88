#include "dmnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dmnls/text_io.hpp"

namespace dmnls {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double parity(long m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// Natural (increasing xi) order <-> FFT order is a swap of the two halves.
void swap_halves(std::span<cplx> v) {
  const auto half = v.size() / 2;
  std::swap_ranges(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half),
                   v.begin() + static_cast<std::ptrdiff_t>(half));
}

void require_size(std::span<const cplx> v, std::size_t n, const char* what) {
  if (v.size() != n) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

Grid::Grid(std::size_t n, double length, KernelSign sign)
    : n_(n), length_(length), sign_(sign), x_(n), xi_(n) {
  if (n < 8 || !is_power_of_two(n))
    throw std::invalid_argument("Grid: n must be a power of two >= 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("Grid: length must be positive and finite");
  const double h = dx();
  const double k = dxi();
  const long half = static_cast<long>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    x_[j] = -0.5 * length + static_cast<double>(j) * h;
    xi_[j] = k * static_cast<double>(static_cast<long>(j) - half);
  }
  plan_ = std::make_unique<FftPlan>(n);
  fine_plan_ = std::make_unique<FftPlan>(2 * n);
}

std::shared_ptr<const Grid> Grid::make(std::size_t n, double length, KernelSign sign) {
  return std::make_shared<const Grid>(n, length, sign);
}

double Grid::dxi() const { return 2.0 * std::numbers::pi / length_; }

// data holds position samples in lattice order; on return it holds the
// transform in natural frequency order.
void Grid::forward_impl(const FftPlan& plan, double spacing, std::span<cplx> data) const {
  if (sign_ == KernelSign::standard)
    plan.positive_exponent(data);
  else
    plan.negative_exponent(data);
  swap_halves(data);
  const long half = static_cast<long>(data.size() / 2);
  const double scale = kInvSqrt2Pi * spacing;
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] *= scale * parity(static_cast<long>(i) - half);
}

// data holds natural-order frequency samples; on return, position samples.
void Grid::inverse_impl(const FftPlan& plan, std::span<cplx> data) const {
  const long half = static_cast<long>(data.size() / 2);
  const double scale = kInvSqrt2Pi * dxi();
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] *= scale * parity(static_cast<long>(i) - half);
  swap_halves(data);
  if (sign_ == KernelSign::standard)
    plan.negative_exponent(data);
  else
    plan.positive_exponent(data);
}

void Grid::to_frequency(std::span<const cplx> in, std::span<cplx> out) const {
  require_size(in, n_, "to_frequency");
  require_size(out, n_, "to_frequency");
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  forward_impl(*plan_, dx(), out);
}

void Grid::to_position(std::span<const cplx> in, std::span<cplx> out) const {
  require_size(in, n_, "to_position");
  require_size(out, n_, "to_position");
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  inverse_impl(*plan_, out);
}

void Grid::to_fine_position(std::span<const cplx> in, std::span<cplx> fine) const {
  require_size(in, n_, "to_fine_position");
  require_size(fine, 2 * n_, "to_fine_position");
  std::fill(fine.begin(), fine.end(), cplx{});
  // Natural index on the 2n lattice is i + n/2.
  std::copy(in.begin(), in.end(), fine.begin() + static_cast<std::ptrdiff_t>(n_ / 2));
  inverse_impl(*fine_plan_, fine);
}

void Grid::fine_to_frequency(std::span<const cplx> fine, std::span<cplx> out) const {
  require_size(fine, 2 * n_, "fine_to_frequency");
  require_size(out, n_, "fine_to_frequency");
  std::vector<cplx> buf(fine.begin(), fine.end());
  fine_to_frequency_consume(buf, out);
}

void Grid::fine_to_frequency_consume(std::span<cplx> fine, std::span<cplx> out) const {
  require_size(fine, 2 * n_, "fine_to_frequency");
  require_size(out, n_, "fine_to_frequency");
  forward_impl(*fine_plan_, 0.5 * dx(), fine);
  std::copy_n(fine.begin() + static_cast<std::ptrdiff_t>(n_ / 2), n_, out.begin());
}

std::string to_string(Space s) { return s == Space::position ? "position" : "frequency"; }

bool all_finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

Field::Field(GridPtr grid, std::vector<cplx> values, Space space)
    : grid_(std::move(grid)), values_(std::move(values)), space_(space) {
  if (!grid_) throw std::invalid_argument("Field: null grid");
  if (values_.size() != grid_->n())
    throw std::invalid_argument("Field: expected " + std::to_string(grid_->n()) +
                                " samples, got " + std::to_string(values_.size()));
  if (!all_finite(values_)) throw std::domain_error("Field: non-finite sample");
}

Field Field::zeros(GridPtr grid, Space space) {
  const auto n = grid->n();
  return Field(std::move(grid), std::vector<cplx>(n), space);
}

Field forward_transform(const Field& f) {
  if (f.space() != Space::position)
    throw std::invalid_argument("forward_transform: expected a position-space field");
  std::vector<cplx> out(f.size());
  f.grid().to_frequency(f.values(), out);
  return Field(f.grid_ptr(), std::move(out), Space::frequency);
}

Field inverse_transform(const Field& f) {
  if (f.space() != Space::frequency)
    throw std::invalid_argument("inverse_transform: expected a frequency-space field");
  std::vector<cplx> out(f.size());
  f.grid().to_position(f.values(), out);
  return Field(f.grid_ptr(), std::move(out), Space::position);
}

Field spectral_derivative(const Field& f) {
  if (f.space() != Space::position)
    throw std::invalid_argument("spectral_derivative: expected a position-space field");
  const Grid& g = f.grid();
  std::vector<cplx> buf(f.size());
  g.to_frequency(f.values(), buf);
  const auto xi = g.xi();
  const cplx minus_i{0.0, -1.0};
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= minus_i * xi[i];
  buf[0] = 0.0;  // unpaired Nyquist mode
  g.to_position(buf, buf);
  return Field(f.grid_ptr(), std::move(buf), Space::position);
}

double l2_norm(const Grid& grid, std::span<const cplx> v, Space space) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s * (space == Space::position ? grid.dx() : grid.dxi()));
}

double sup_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

namespace {

double h1_from_frequency(const Grid& g, std::span<const cplx> fh) {
  const auto xi = g.xi();
  double s = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) s += (1.0 + xi[i] * xi[i]) * std::norm(fh[i]);
  return std::sqrt(s * g.dxi());
}

double weighted_l2(const Grid& g, std::span<const cplx> f) {
  const auto x = g.x();
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += x[j] * x[j] * std::norm(f[j]);
  return std::sqrt(s * g.dx());
}

}  // namespace

double norm(const Field& f, NormKind kind) {
  const Grid& g = f.grid();
  double r = 0.0;
  switch (kind) {
    case NormKind::L2:
      r = l2_norm(g, f.values(), f.space());
      break;
    case NormKind::Linf:
      r = sup_norm(f.values());
      break;
    case NormKind::H1:
    case NormKind::H11:
    case NormKind::weightedL2: {
      if (f.space() != Space::position)
        throw std::invalid_argument("norm: H1/H11/weightedL2 need a position-space field");
      if (kind == NormKind::weightedL2) {
        r = weighted_l2(g, f.values());
        break;
      }
      std::vector<cplx> fh(f.size());
      g.to_frequency(f.values(), fh);
      r = h1_from_frequency(g, fh);
      if (kind == NormKind::H11) r += weighted_l2(g, f.values());
      break;
    }
  }
  if (!std::isfinite(r)) throw std::domain_error("norm: non-finite result");
  return r;
}

namespace {
void require_compatible(const Field& a, const Field& b) {
  if (a.grid_ptr() != b.grid_ptr() && (a.grid().n() != b.grid().n() ||
                                       a.grid().length() != b.grid().length()))
    throw std::invalid_argument("fields live on different grids");
  if (a.space() != b.space()) throw std::invalid_argument("fields live in different spaces");
}
}  // namespace

double sup_distance(const Field& a, const Field& b) {
  require_compatible(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_distance(const Field& a, const Field& b) {
  require_compatible(a, b);
  std::vector<cplx> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return l2_norm(a.grid(), d, a.space());
}

void write_field_csv(const std::filesystem::path& path, const Field& f, double t) {
  std::string out;
  out.reserve(f.size() * 64);
  out += "# space=" + to_string(f.space()) + " t=" + format_double(t) +
         " n=" + std::to_string(f.grid().n()) + " L=" + format_double(f.grid().length()) + "\n";
  out += "coord,re,im\n";
  const auto coords = f.space() == Space::position ? f.grid().x() : f.grid().xi();
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += format_double(coords[i]);
    out += ',';
    out += format_double(f[i].real());
    out += ',';
    out += format_double(f[i].imag());
    out += '\n';
  }
  write_file_atomic(path, out);
}

FieldFile read_field_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0)
    throw std::runtime_error(path.string() + ": missing '# space=...' header");
  FieldFile ff{};
  bool have_space = false, have_t = false, have_n = false, have_l = false;
  std::istringstream hdr(line.substr(1));
  std::string tok;
  while (hdr >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const auto key = tok.substr(0, eq);
    const auto val = tok.substr(eq + 1);
    if (key == "space") {
      if (val == "position") ff.space = Space::position;
      else if (val == "frequency") ff.space = Space::frequency;
      else throw std::runtime_error(path.string() + ": unknown space '" + val + "'");
      have_space = true;
    } else if (key == "t") {
      ff.t = parse_double(val);
      have_t = true;
    } else if (key == "n") {
      ff.n = static_cast<std::size_t>(std::stoull(val));
      have_n = true;
    } else if (key == "L") {
      ff.length = parse_double(val);
      have_l = true;
    }
  }
  if (!(have_space && have_t && have_n && have_l))
    throw std::runtime_error(path.string() + ": incomplete header");
  if (!std::getline(in, line) || trim(line) != "coord,re,im")
    throw std::runtime_error(path.string() + ": expected 'coord,re,im' column line");
  while (std::getline(in, line)) {
    const auto s = trim(line);
    if (s.empty()) continue;
    const auto c1 = s.find(',');
    const auto c2 = s.find(',', c1 == std::string_view::npos ? 0 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
      throw std::runtime_error(path.string() + ": malformed row '" + std::string(s) + "'");
    ff.coords.push_back(parse_double(s.substr(0, c1)));
    ff.values.emplace_back(parse_double(s.substr(c1 + 1, c2 - c1 - 1)),
                           parse_double(s.substr(c2 + 1)));
  }
  if (ff.values.size() != ff.n)
    throw std::runtime_error(path.string() + ": header says n=" + std::to_string(ff.n) +
                             " but file has " + std::to_string(ff.values.size()) + " rows");
  return ff;
}

Field read_field_csv(const std::filesystem::path& path, const GridPtr& grid, double* t) {
  auto ff = read_field_csv(path);
  if (ff.n != grid->n() || std::abs(ff.length - grid->length()) > 1e-12 * grid->length())
    throw std::runtime_error(path.string() + ": written on grid n=" + std::to_string(ff.n) +
                             " L=" + format_double(ff.length) + ", expected n=" +
                             std::to_string(grid->n()) + " L=" + format_double(grid->length()));
  if (t) *t = ff.t;
  return Field(grid, std::move(ff.values), ff.space);
}

}  // namespace dmnls
