#include "fft.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace scm::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int sign_of(FftDirection dir) { return dir == FftDirection::kForward ? FFTW_FORWARD : FFTW_BACKWARD; }

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

FftPlan::FftPlan(int n, FftDirection dir) : size_(n) {
  if (n <= 0) throw std::invalid_argument("FFT length must be positive");
  std::vector<Complex> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(n, buf, buf, sign_of(dir), kFlags);
  if (!plan_) throw std::runtime_error("fftw_plan_dft_1d failed");
}

FftPlan::FftPlan(int rows, int cols, FftDirection dir) : size_(rows * cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("FFT shape must be positive");
  std::vector<Complex> scratch(static_cast<std::size_t>(rows) * cols);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_2d(rows, cols, buf, buf, sign_of(dir), kFlags);
  if (!plan_) throw std::runtime_error("fftw_plan_dft_2d failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_);
}

void FftPlan::execute(std::span<const Complex> in, std::span<Complex> out) const {
  if (static_cast<int>(in.size()) != size_ || static_cast<int>(out.size()) != size_) {
    throw std::invalid_argument("FFT buffer size mismatch");
  }
  // Plans are in-place; stage the input into out.
  auto* o = reinterpret_cast<fftw_complex*>(out.data());
  if (in.data() != out.data()) {
    std::copy(in.begin(), in.end(), out.begin());
  }
  fftw_execute_dft(plan_, o, o);
}

}  // namespace scm::detail
