#include "beltrami/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "beltrami/errors.hpp"

namespace beltrami {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plan creation is not thread-safe in FFTW; execution of an existing plan on
// new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  PlanPair p;
  p.forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!p.forward || !p.backward) throw InvalidGrid("FFTW planning failed for n = " + std::to_string(n));
  return cache.emplace(n, p).first->second;
}

void check(std::span<std::complex<double>> data, int n) {
  if (data.size() != static_cast<std::size_t>(n) * n) throw InvalidGrid("FFT buffer size mismatch");
}

fftw_complex* as_fftw(std::span<std::complex<double>> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

void fft2d_forward(std::span<std::complex<double>> data, int n) {
  check(data, n);
  fftw_execute_dft(plans_for(n).forward, as_fftw(data), as_fftw(data));
}

void fft2d_inverse(std::span<std::complex<double>> data, int n) {
  check(data, n);
  fftw_execute_dft(plans_for(n).backward, as_fftw(data), as_fftw(data));
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (auto& v : data) v *= scale;
}

}  // namespace beltrami
