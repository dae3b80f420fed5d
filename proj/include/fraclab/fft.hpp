#ifndef FRACLAB_FFT_HPP
#define FRACLAB_FFT_HPP

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fraclab {

// Thin RAII wrapper over FFTW's 1-d real transforms. Plan creation is
// serialized behind a global mutex (FFTW planning is not thread safe);
// execution locks a per-object mutex so a shared instance can be used from
// several threads. inverse() applies the 1/n normalization.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const;
  std::size_t n_modes() const;  // n/2 + 1

  std::vector<std::complex<double>> forward(std::span<const double> in) const;
  std::vector<double> inverse(std::span<const std::complex<double>> in) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fraclab

#endif
