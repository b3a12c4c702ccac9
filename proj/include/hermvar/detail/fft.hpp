#ifndef HERMVAR_DETAIL_FFT_HPP
#define HERMVAR_DETAIL_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace hermvar::detail {

// FFTW planning is not thread-safe; execution with the new-array interface is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

/// Unnormalized complex DFT of fixed size, callable concurrently.
/// FFTW_ESTIMATE keeps the chosen algorithm (and hence the bits) stable
/// from run to run.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t size, int sign = FFTW_FORWARD) : size_(size) {
    if (size == 0) throw std::invalid_argument("ComplexFft: size must be positive");
    std::vector<std::complex<double>> in(size), out(size);
    std::lock_guard lock(fftw_planner_mutex());
    plan_.reset(fftw_plan_dft_1d(static_cast<int>(size), reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED));
    if (!plan_) throw std::runtime_error("ComplexFft: planning failed");
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }

  void execute(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) const {
    if (in.size() != size_ || out.size() != size_) throw std::invalid_argument("ComplexFft: size mismatch");
    fftw_execute_dft(plan_.get(), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }

 private:
  std::size_t size_;
  FftwPlan plan_;
};

/// Real-to-half-complex forward DFT of fixed (even) size.
class RealFft {
 public:
  explicit RealFft(std::size_t size) : size_(size) {
    if (size == 0) throw std::invalid_argument("RealFft: size must be positive");
    std::vector<double> in(size);
    std::vector<std::complex<double>> out(size / 2 + 1);
    std::lock_guard lock(fftw_planner_mutex());
    plan_.reset(fftw_plan_dft_r2c_1d(static_cast<int>(size), in.data(),
                                     reinterpret_cast<fftw_complex*>(out.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED));
    if (!plan_) throw std::runtime_error("RealFft: planning failed");
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }

  void execute(std::vector<double>& in, std::vector<std::complex<double>>& out) const {
    if (in.size() != size_ || out.size() != size_ / 2 + 1)
      throw std::invalid_argument("RealFft: size mismatch");
    fftw_execute_dft_r2c(plan_.get(), in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  }

 private:
  std::size_t size_;
  FftwPlan plan_;
};

}  // namespace hermvar::detail

#endif  // HERMVAR_DETAIL_FFT_HPP
