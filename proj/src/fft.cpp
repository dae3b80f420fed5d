#include "fraclab/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  mutable std::mutex exec;

  explicit Impl(std::size_t n_) : n(n_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    require(real && cplx, Errc::io_error, "fftw allocation failed");
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, cplx, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real, FFTW_ESTIMATE);
    require(fwd && inv, Errc::io_error, "fftw plan creation failed");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (real) fftw_free(real);
    if (cplx) fftw_free(cplx);
  }
};

RealFft::RealFft(std::size_t n) : impl_(std::make_unique<Impl>(n)) {
  require(n >= 2, Errc::invalid_argument, "fft size must be >= 2");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::size_t RealFft::size() const { return impl_->n; }
std::size_t RealFft::n_modes() const { return impl_->n / 2 + 1; }

std::vector<std::complex<double>> RealFft::forward(std::span<const double> in) const {
  require(in.size() == impl_->n, Errc::invalid_argument, "fft forward: size mismatch");
  std::lock_guard<std::mutex> lock(impl_->exec);
  for (std::size_t i = 0; i < impl_->n; ++i) impl_->real[i] = in[i];
  fftw_execute(impl_->fwd);
  std::vector<std::complex<double>> out(impl_->n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = {impl_->cplx[k][0], impl_->cplx[k][1]};
  return out;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> in) const {
  require(in.size() == impl_->n / 2 + 1, Errc::invalid_argument, "fft inverse: size mismatch");
  std::lock_guard<std::mutex> lock(impl_->exec);
  for (std::size_t k = 0; k < in.size(); ++k) {
    impl_->cplx[k][0] = in[k].real();
    impl_->cplx[k][1] = in[k].imag();
  }
  fftw_execute(impl_->inv);
  std::vector<double> out(impl_->n);
  const double scale = 1.0 / static_cast<double>(impl_->n);
  for (std::size_t i = 0; i < impl_->n; ++i) out[i] = impl_->real[i] * scale;
  return out;
}

}  // namespace fraclab
