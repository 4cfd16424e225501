#include "core/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace vpk {

namespace {
// FFTW plan creation is not thread safe; execution on distinct arrays is.
std::mutex plan_mutex;

void run_1d(cvec& x, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(x.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(x.size()), p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
}

void run_rows(std::complex<double>* data, std::size_t n_rows, std::size_t n, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  int ni = static_cast<int>(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_many_dft(1, &ni, static_cast<int>(n_rows), p, nullptr, 1, ni, p, nullptr, 1,
                              ni, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
}
} // namespace

void fft_forward(cvec& x) { run_1d(x, FFTW_FORWARD); }

void fft_inverse(cvec& x) {
  run_1d(x, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v *= s;
}

void fft_forward_rows(std::complex<double>* data, std::size_t n_rows, std::size_t n) {
  run_rows(data, n_rows, n, FFTW_FORWARD);
}

void fft_inverse_rows(std::complex<double>* data, std::size_t n_rows, std::size_t n) {
  run_rows(data, n_rows, n, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n_rows * n; ++i) data[i] *= s;
}

std::size_t next_fast_size(std::size_t n) {
  auto smooth = [](std::size_t m) {
    for (std::size_t f : {2, 3, 5})
      while (m % f == 0) m /= f;
    return m == 1;
  };
  while (!smooth(n)) ++n;
  return n;
}

} // namespace vpk
