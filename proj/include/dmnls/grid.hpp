#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dmnls/fft.hpp"

namespace dmnls {

/// Sign of the exponent in the forward transform kernel.
///
/// `standard` is the convention used throughout the project:
///   F[f](xi) = (2 pi)^{-1/2} \int e^{+i x xi} f(x) dx,
/// under which d/dx is the multiplier -i xi and e^{it Delta} is e^{-i t xi^2}.
/// `flipped` exists only so the verification suite can demonstrate that it
/// detects a convention error.
enum class KernelSign { standard, flipped };

/// Uniform periodic lattice on [-L/2, L/2) together with its frequency
/// lattice xi_m = 2 pi m / L, m = -n/2 .. n/2-1, stored in increasing order.
///
/// Also owns the FFT plans for n points and for the 2n-point refinement used
/// by dealiased products. Grids are immutable and shared through GridPtr.
class Grid {
 public:
  static std::shared_ptr<const Grid> make(std::size_t n, double length,
                                          KernelSign sign = KernelSign::standard);

  std::size_t n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / static_cast<double>(n_); }
  double dxi() const;
  double xi_max() const { return -xi_.front(); }
  KernelSign sign() const { return sign_; }

  std::span<const double> x() const { return x_; }
  std::span<const double> xi() const { return xi_; }
  std::size_t fine_n() const { return 2 * n_; }

  /// Position samples (n) -> transform on the frequency lattice (n).
  void to_frequency(std::span<const cplx> in, std::span<cplx> out) const;
  /// Frequency lattice (n) -> position samples (n).
  void to_position(std::span<const cplx> in, std::span<cplx> out) const;
  /// Frequency lattice (n) -> trigonometric interpolant sampled on the 2n-point refinement.
  void to_fine_position(std::span<const cplx> in, std::span<cplx> fine) const;
  /// 2n-point refinement samples -> the n lowest frequency modes (higher modes discarded).
  void fine_to_frequency(std::span<const cplx> fine, std::span<cplx> out) const;
  /// As fine_to_frequency, but uses `fine` as the work buffer (its contents are destroyed).
  void fine_to_frequency_consume(std::span<cplx> fine, std::span<cplx> out) const;

  Grid(std::size_t n, double length, KernelSign sign);

 private:
  void forward_impl(const FftPlan& plan, double spacing, std::span<cplx> data) const;
  void inverse_impl(const FftPlan& plan, std::span<cplx> data) const;

  std::size_t n_;
  double length_;
  KernelSign sign_;
  std::vector<double> x_;
  std::vector<double> xi_;
  std::unique_ptr<FftPlan> plan_;
  std::unique_ptr<FftPlan> fine_plan_;
};

using GridPtr = std::shared_ptr<const Grid>;

enum class Space { position, frequency };

std::string to_string(Space s);

/// Complex samples on a Grid, tagged with the space they live in.
/// Construction rejects NaN/Inf samples and length mismatches.
class Field {
 public:
  Field(GridPtr grid, std::vector<cplx> values, Space space);

  static Field zeros(GridPtr grid, Space space);

  template <class Fn>
  static Field from_position_function(GridPtr grid, Fn&& fn) {
    std::vector<cplx> v(grid->n());
    const auto x = grid->x();
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(x[j]);
    return Field(std::move(grid), std::move(v), Space::position);
  }

  template <class Fn>
  static Field from_frequency_function(GridPtr grid, Fn&& fn) {
    std::vector<cplx> v(grid->n());
    const auto xi = grid->xi();
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(xi[j]);
    return Field(std::move(grid), std::move(v), Space::frequency);
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Space space() const { return space_; }
  std::span<const cplx> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// Releases the sample buffer (the field is left empty).
  std::vector<cplx> take_values() && { return std::move(values_); }

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
  Space space_;
};

Field forward_transform(const Field& f);
Field inverse_transform(const Field& f);
Field spectral_derivative(const Field& f);

enum class NormKind { L2, Linf, H1, H11, weightedL2 };

double norm(const Field& f, NormKind kind);

/// Max modulus of a - b (same grid and space).
double sup_distance(const Field& a, const Field& b);
/// L2 norm of a - b (same grid and space).
double l2_distance(const Field& a, const Field& b);

/// Quadrature-weighted L2 norm of raw samples (dx for position, dxi for frequency).
double l2_norm(const Grid& grid, std::span<const cplx> v, Space space);
double sup_norm(std::span<const cplx> v);

bool all_finite(std::span<const cplx> v);

/// Snapshot CSV: `# space=<..> t=<t> n=<n> L=<L>` header, then `coord,re,im` rows.
void write_field_csv(const std::filesystem::path& path, const Field& f, double t);

struct FieldFile {
  Space space;
  double t;
  std::size_t n;
  double length;
  std::vector<double> coords;
  std::vector<cplx> values;
};

FieldFile read_field_csv(const std::filesystem::path& path);

/// Reads a snapshot and checks it was written on `grid`.
Field read_field_csv(const std::filesystem::path& path, const GridPtr& grid, double* t = nullptr);

}  // namespace dmnls
