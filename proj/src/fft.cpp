#include "fracflow/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace fracflow::fft {
namespace {

// fftw planning is not thread-safe; execution with the new-array interface is.
std::mutex planner_mutex;

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

const PlanPair& plans_for(std::size_t m) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(planner_mutex);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  const int n = static_cast<int>(m);
  std::vector<double> real(m);
  std::vector<fftw_complex> cplx(m / 2 + 1);
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c_1d(n, real.data(), cplx.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_1d(n, cplx.data(), real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p.r2c == nullptr || p.c2r == nullptr) throw std::runtime_error("fftw planning failed");
  return cache.emplace(m, p).first->second;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> samples) {
  const std::size_t m = samples.size();
  if (m == 0 || m % 2 != 0) throw std::invalid_argument("fft::forward needs an even sample count");
  const auto& plan = plans_for(m);
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<std::complex<double>> out(m / 2 + 1);
  fftw_execute_dft_r2c(plan.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(m);
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<double> inverse(std::span<const std::complex<double>> half_spectrum, std::size_t m) {
  if (half_spectrum.size() != m / 2 + 1) throw std::invalid_argument("fft::inverse size mismatch");
  const auto& plan = plans_for(m);
  // c2r overwrites its input
  std::vector<std::complex<double>> in(half_spectrum.begin(), half_spectrum.end());
  std::vector<double> out(m);
  fftw_execute_dft_c2r(plan.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out;
}

}  // namespace fracflow::fft
