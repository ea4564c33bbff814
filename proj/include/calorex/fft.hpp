#ifndef CALOREX_FFT_HPP
#define CALOREX_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <span>

namespace calorex::detail {

/// FFTW's planner is not thread-safe; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Owning, FFTW-aligned complex buffer.
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n) : n_(n) {
    data_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * n));
    if (!data_) throw std::bad_alloc();
  }
  ~FftBuffer() { fftw_free(data_); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  std::complex<double>* data() { return data_; }
  const std::complex<double>* data() const { return data_; }
  std::size_t size() const { return n_; }
  std::span<std::complex<double>> span() { return {data_, n_}; }
  std::complex<double>& operator[](std::size_t i) { return data_[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return data_[i]; }

 private:
  std::complex<double>* data_ = nullptr;
  std::size_t n_ = 0;
};

/// In-place forward/backward transforms of one size. The backward transform
/// is unnormalized, as in FFTW.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n), scratch_(n) {
    std::lock_guard lock(fftw_planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(scratch_.data());
    const int size = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(size, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(size, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }
  void forward(FftBuffer& b) const { run(forward_, b); }
  void backward(FftBuffer& b) const { run(backward_, b); }

 private:
  static void run(fftw_plan p, FftBuffer& b) {
    auto* d = reinterpret_cast<fftw_complex*>(b.data());
    fftw_execute_dft(p, d, d);
  }

  std::size_t n_;
  FftBuffer scratch_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace calorex::detail

#endif  // CALOREX_FFT_HPP
