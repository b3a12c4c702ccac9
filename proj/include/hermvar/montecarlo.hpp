#ifndef HERMVAR_MONTECARLO_HPP
#define HERMVAR_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hermvar/detail/numerics.hpp"
#include "hermvar/fgn.hpp"
#include "hermvar/rng.hpp"
#include "hermvar/variations.hpp"

namespace hermvar {

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, count) on `threads` workers with static
/// contiguous chunks. fn must write only to slot i of its outputs.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

struct McSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double se = 0.0;        // standard error of the mean
  std::size_t batch = 0;
};

/// Summary statistics; reductions are compensated and follow index order,
/// so the result does not depend on how the batch was scheduled.
inline McSummary summarize(std::span<const double> values) {
  McSummary s;
  s.batch = values.size();
  if (values.empty()) return s;
  s.mean = detail::compensated_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    detail::CompensatedSum sq;
    for (double v : values) sq.add((v - s.mean) * (v - s.mean));
    s.variance = sq.value() / static_cast<double>(values.size() - 1);
    s.se = std::sqrt(s.variance / static_cast<double>(values.size()));
  }
  return s;
}

struct SampleMeta {
  int q = 0;
  double h = 0.0;
  std::size_t n = 0;
  std::size_t batch = 0;
  Seed seed{};
};

struct SampleSet {
  std::vector<double> values;
  SampleMeta meta;
};

/// Batch of Z_n (regime normalization) from independent exact paths;
/// path i uses stream id i of `seed`.
inline SampleSet sample_zn(const RegimeSpec& spec, std::size_t n, std::size_t batch, Seed seed,
                           unsigned threads = default_threads(), SamplerMethod method = SamplerMethod::Circulant) {
  if (batch < 1) throw std::invalid_argument("sample_zn: batch must be >= 1");
  const FgnSampler sampler(spec.h, n, method);
  SampleSet out{std::vector<double>(batch), SampleMeta{spec.q, spec.h.value(), n, batch, seed}};
  const double norm = normalizer(spec, n);
  parallel_for(batch, threads, [&](std::size_t i) {
    const FgnPath p = sampler.sample(seed.with_stream(i));
    out.values[i] = v_n(spec.q, p) / norm;
  });
  return out;
}

}  // namespace hermvar

#endif  // HERMVAR_MONTECARLO_HPP
