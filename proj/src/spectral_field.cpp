#include "displab/spectral_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace displab {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class GridTransform {
 public:
  explicit GridTransform(int size) : size_(size) {
    buffer_ = fftw_alloc_complex(static_cast<std::size_t>(size));
    std::lock_guard lock(planner_mutex());
    to_grid_ = fftw_plan_dft_1d(size, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    to_modes_ = fftw_plan_dft_1d(size, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~GridTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(to_grid_);
    fftw_destroy_plan(to_modes_);
    fftw_free(buffer_);
  }
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buffer_); }
  int size() const { return size_; }
  void synthesize() { fftw_execute(to_grid_); }
  void analyze() { fftw_execute(to_modes_); }

 private:
  int size_;
  fftw_complex* buffer_;
  fftw_plan to_grid_;
  fftw_plan to_modes_;
};

// Per-thread workspaces keyed by grid size.
GridTransform& workspace(int size) {
  thread_local std::map<int, std::unique_ptr<GridTransform>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<GridTransform>(size);
  return *slot;
}

void load_modes(GridTransform& tr, const SpectralField& field) {
  const int m = tr.size();
  const int n_max = field.truncation();
  if (2 * n_max + 1 > m) throw std::invalid_argument("grid too small for field truncation");
  cplx* data = tr.data();
  std::fill(data, data + m, cplx{});
  for (int n = -n_max; n <= n_max; ++n) data[(n + m) % m] = field[n];
}

SpectralField store_modes(GridTransform& tr, int truncation) {
  const int m = tr.size();
  const cplx* data = tr.data();
  SpectralField out(truncation);
  const double scale = 1.0 / m;
  for (int n = -truncation; n <= truncation; ++n) out.mode(n) = data[(n + m) % m] * scale;
  return out;
}

}  // namespace

SpectralField::SpectralField(int truncation, bool real, bool zero_mean)
    : truncation_(truncation),
      coeffs_(truncation >= 0 ? static_cast<std::size_t>(2 * truncation + 1) : 0),
      real_(real),
      zero_mean_(zero_mean) {
  if (truncation < 0) throw std::invalid_argument("negative truncation");
}

SpectralField SpectralField::unit(int truncation, int n) {
  if (std::abs(n) > truncation) throw std::out_of_range("mode outside truncation");
  SpectralField f(truncation, n == 0, n != 0);
  f.mode(n) = 1.0;
  return f;
}

cplx SpectralField::at_or_zero(int n) const {
  return std::abs(n) <= truncation_ ? coeffs_[index(n)] : cplx{};
}

SpectralField SpectralField::with_flags(bool real, bool zero_mean) const {
  SpectralField out = *this;
  out.real_ = real;
  out.zero_mean_ = zero_mean;
  return out;
}

double SpectralField::reality_defect() const {
  double defect = 0.0;
  for (int n = 0; n <= truncation_; ++n)
    defect = std::max(defect, std::abs((*this)[-n] - std::conj((*this)[n])));
  return defect;
}

SpectralField SpectralField::resized(int truncation) const {
  SpectralField out(truncation, real_, zero_mean_);
  const int common = std::min(truncation, truncation_);
  for (int n = -common; n <= common; ++n) out.mode(n) = (*this)[n];
  return out;
}

SpectralField SpectralField::conjugated() const {
  SpectralField out(truncation_, real_, zero_mean_);
  for (int n = -truncation_; n <= truncation_; ++n) out.mode(n) = std::conj((*this)[-n]);
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.truncation_ != truncation_) throw std::invalid_argument("truncation mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  real_ = real_ && other.real_;
  zero_mean_ = zero_mean_ && other.zero_mean_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.truncation_ != truncation_) throw std::invalid_argument("truncation mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  real_ = real_ && other.real_;
  zero_mean_ = zero_mean_ && other.zero_mean_;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx scalar) {
  for (auto& c : coeffs_) c *= scalar;
  real_ = real_ && scalar.imag() == 0.0;
  return *this;
}

SpectralField& SpectralField::operator*=(double scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

SpectralField symmetrized(const SpectralField& field) {
  SpectralField out(field.truncation(), true, field.zero_mean_flag());
  const int n_max = field.truncation();
  for (int n = 0; n <= n_max; ++n) {
    const cplx avg = 0.5 * (field[n] + std::conj(field[-n]));
    out.mode(n) = avg;
    out.mode(-n) = std::conj(avg);
  }
  if (out.zero_mean_flag()) out.mode(0) = 0.0;
  return out;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField make_field(int truncation, std::initializer_list<std::pair<int, cplx>> modes) {
  SpectralField f(truncation);
  for (const auto& [n, value] : modes) {
    if (std::abs(n) > truncation) throw std::out_of_range("mode outside truncation");
    f.mode(n) += value;
  }
  const bool real = f.reality_defect() == 0.0;
  return f.with_flags(real, f[0] == cplx{});
}

double hs_norm(const SpectralField& field, double s) {
  double sum = 0.0;
  const int n_max = field.truncation();
  for (int n = -n_max; n <= n_max; ++n) {
    const double weight = s == 0.0 ? 1.0 : std::pow(static_cast<double>(n) * n + 1.0, s);
    sum += weight * std::norm(field[n]);
  }
  return std::sqrt(sum);
}

cplx pairing(const SpectralField& v, const SpectralField& w) {
  const int n_max = std::min(v.truncation(), w.truncation());
  cplx sum{};
  for (int n = -n_max; n <= n_max; ++n) sum += v[n] * w[-n];
  return sum;
}

cplx inner_product(const SpectralField& v, const SpectralField& w) {
  if (v.truncation() != w.truncation()) throw std::invalid_argument("truncation mismatch");
  const int n_max = v.truncation();
  cplx sum{};
  for (int n = -n_max; n <= n_max; ++n) sum += v[n] * std::conj(w[n]);
  return sum;
}

SpectralField derivative(const SpectralField& field, int order) {
  if (order < 1) throw std::invalid_argument("derivative order must be positive");
  SpectralField out(field.truncation(), field.real_flag(), field.zero_mean_flag());
  const int n_max = field.truncation();
  for (int n = -n_max; n <= n_max; ++n) {
    // (i n)^order without pow() so that reality is kept bit-exact.
    cplx factor = 1.0;
    for (int k = 0; k < order; ++k) factor *= cplx(0.0, static_cast<double>(n));
    out.mode(n) = factor * field[n];
  }
  return out;
}

int padded_grid_size(int truncation) {
  int m = 1;
  while (m < 4 * truncation + 2) m *= 2;
  return m;
}

std::vector<cplx> to_physical(const SpectralField& field, int grid_size) {
  auto& tr = workspace(grid_size);
  load_modes(tr, field);
  tr.synthesize();
  return {tr.data(), tr.data() + grid_size};
}

SpectralField from_physical(std::span<const cplx> values, int truncation) {
  const int m = static_cast<int>(values.size());
  auto& tr = workspace(m);
  std::copy(values.begin(), values.end(), tr.data());
  tr.analyze();
  return store_modes(tr, truncation);
}

SpectralField dealiased_product(std::span<const SpectralField> factors,
                                std::span<const bool> conjugate) {
  if (factors.size() < 2 || factors.size() > 3)
    throw std::invalid_argument("dealiased_product takes 2 or 3 factors");
  if (conjugate.size() != factors.size())
    throw std::invalid_argument("conjugation mask size mismatch");
  const int n_max = factors[0].truncation();
  for (const auto& f : factors)
    if (f.truncation() != n_max)
      throw std::invalid_argument("grid-size mismatch between factors: N=" +
                                  std::to_string(f.truncation()) + " vs " + std::to_string(n_max));

  const int m = padded_grid_size(n_max);
  auto& tr = workspace(m);
  cplx* data = tr.data();
  const bool real = std::all_of(factors.begin(), factors.end(),
                                [](const SpectralField& f) { return f.real_flag(); });
  if (real && factors.size() == 2) {
    // Two real factors share one transform: f + i g synthesizes to f(x) + i g(x).
    std::fill(data, data + m, cplx{});
    const cplx i(0.0, 1.0);
    for (int n = -n_max; n <= n_max; ++n) data[(n + m) % m] = factors[0][n] + i * factors[1][n];
    tr.synthesize();
    for (int j = 0; j < m; ++j) data[j] = data[j].real() * data[j].imag();
  } else {
    thread_local std::vector<cplx> product;
    product.assign(static_cast<std::size_t>(m), cplx(1.0));
    for (std::size_t k = 0; k < factors.size(); ++k) {
      load_modes(tr, factors[k]);
      tr.synthesize();
      if (conjugate[k]) {
        for (int j = 0; j < m; ++j) product[j] *= std::conj(data[j]);
      } else {
        for (int j = 0; j < m; ++j) product[j] *= data[j];
      }
    }
    std::copy(product.begin(), product.end(), data);
  }
  tr.analyze();
  SpectralField out = store_modes(tr, n_max);
  return real ? symmetrized(out) : out;
}

}  // namespace displab
