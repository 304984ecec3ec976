#pragma once

// Thin FFTW wrapper: cached in-place plans for n-dimensional cubes of side N
// carrying `howmany` interleaved components.

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "torpsido/core.hpp"

namespace torpsido::detail {

class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  FftPlanCache(const FftPlanCache&) = delete;
  FftPlanCache& operator=(const FftPlanCache&) = delete;

  ~FftPlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int N, int howmany, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n, N, howmany, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> dims(n, N);
    const std::size_t total = ipow(static_cast<std::size_t>(N), n) * howmany;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    fftw_plan plan = fftw_plan_many_dft(n, dims.data(), howmany, buf, nullptr, howmany, 1, buf,
                                        nullptr, howmany, 1, sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (plan == nullptr) throw std::runtime_error("fftw: could not create plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  FftPlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

/// In-place unnormalized DFT over an N^n cube; data is node-major with
/// `howmany` contiguous components per node. sign = FFTW_FORWARD or FFTW_BACKWARD.
inline void fft_inplace(std::vector<cplx>& data, int n, int N, int howmany, int sign) {
  fftw_plan plan = FftPlanCache::instance().get(n, N, howmany, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace torpsido::detail
