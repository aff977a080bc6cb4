#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace roomac::fft {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::vector<std::complex<double>> real_forward(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> in(x);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> real_inverse(const std::vector<std::complex<double>>& spec, std::size_t n) {
  std::vector<std::complex<double>> in(spec);
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

namespace {
std::vector<std::complex<double>> complex_transform(const std::vector<std::complex<double>>& x,
                                                    int sign) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> in(x);
  std::vector<std::complex<double>> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}
}  // namespace

std::vector<std::complex<double>> complex_forward(const std::vector<std::complex<double>>& x) {
  return complex_transform(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> complex_inverse(const std::vector<std::complex<double>>& x) {
  auto out = complex_transform(x, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace roomac::fft
