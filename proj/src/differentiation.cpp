#include "kflow/differentiation.hpp"

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>

#include <fftw3.h>

namespace kflow {

std::string to_string(Backend b) { return b == Backend::spectral ? "spectral" : "fd4"; }

Backend parse_backend(std::string_view name) {
  if (name == "spectral") return Backend::spectral;
  if (name == "fd4") return Backend::fd4;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

namespace {

// One real-to-complex / complex-to-real plan pair for lines of length N.
class SpectralLine {
public:
  explicit SpectralLine(int n)
      : n_(n),
        real_(fftw_alloc_real(static_cast<std::size_t>(n))),
        modes_(fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1))),
        forward_(fftw_plan_dft_r2c_1d(n, real_, modes_, FFTW_ESTIMATE)),
        backward_(fftw_plan_dft_c2r_1d(n, modes_, real_, FFTW_ESTIMATE)) {}
  ~SpectralLine() {
    fftw_destroy_plan(backward_);
    fftw_destroy_plan(forward_);
    fftw_free(modes_);
    fftw_free(real_);
  }
  SpectralLine(const SpectralLine&) = delete;
  SpectralLine& operator=(const SpectralLine&) = delete;

  // In-place derivative of one line.
  void apply(std::span<double> line, int order) {
    for (int i = 0; i < n_; ++i) real_[i] = line[static_cast<std::size_t>(i)];
    fftw_execute(forward_);
    const int half = n_ / 2;
    for (int k = 0; k <= half; ++k) {
      std::complex<double> c(modes_[k][0], modes_[k][1]);
      if (order == 1) {
        c = (k == half) ? 0.0 : c * std::complex<double>(0.0, k);
      } else {
        c *= -static_cast<double>(k) * k;
      }
      modes_[k][0] = c.real();
      modes_[k][1] = c.imag();
    }
    fftw_execute(backward_);
    const double inv = 1.0 / n_;
    for (int i = 0; i < n_; ++i) line[static_cast<std::size_t>(i)] = real_[i] * inv;
  }

private:
  int n_;
  double* real_;
  fftw_complex* modes_;
  fftw_plan forward_;
  fftw_plan backward_;
};

SpectralLine& spectral_line(int n) {
  thread_local std::map<int, std::unique_ptr<SpectralLine>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SpectralLine>(n);
  return *slot;
}

void fd4_line(std::span<double> line, int order, double h) {
  const auto n = static_cast<long>(line.size());
  std::vector<double> f(line.begin(), line.end());
  auto at = [&](long i) { return f[static_cast<std::size_t>(((i % n) + n) % n)]; };
  for (long i = 0; i < n; ++i) {
    double d;
    if (order == 1) {
      d = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
    } else {
      d = (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1) - at(i - 2)) /
          (12.0 * h * h);
    }
    line[static_cast<std::size_t>(i)] = d;
  }
}

}  // namespace

std::vector<double> derivative(const PeriodicGrid& grid, std::span<const double> values,
                               Axis axis, int order, Backend backend) {
  if (order != 1 && order != 2) throw std::invalid_argument("derivative: order must be 1 or 2");
  if (values.size() != grid.size()) throw std::invalid_argument("derivative: size mismatch");
  std::vector<double> out(values.size(), 0.0);
  const int slot = grid.slot_of(axis);
  if (slot < 0) return out;

  const int n = grid.resolution();
  const std::size_t stride = grid.stride(slot);
  const std::size_t block = stride * static_cast<std::size_t>(n);
  std::vector<double> line(static_cast<std::size_t>(n));
  // Lines along `slot`: offsets o with index_along(o, slot) == 0.
  for (std::size_t outer = 0; outer < grid.size(); outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      for (int i = 0; i < n; ++i) line[static_cast<std::size_t>(i)] = values[base + i * stride];
      if (backend == Backend::spectral) {
        spectral_line(n).apply(line, order);
      } else {
        fd4_line(line, order, grid.spacing());
      }
      for (int i = 0; i < n; ++i) out[base + i * stride] = line[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

std::vector<double> mixed_derivative(const PeriodicGrid& grid, std::span<const double> values,
                                     Axis a, Axis b, Backend backend) {
  if (a == b) return derivative(grid, values, a, 2, backend);
  if (!grid.is_active(a) || !grid.is_active(b)) return std::vector<double>(values.size(), 0.0);
  const auto first = derivative(grid, values, b, 1, backend);
  return derivative(grid, first, a, 1, backend);
}

}  // namespace kflow
