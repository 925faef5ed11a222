#ifndef SGSURF_PARALLEL_HPP
#define SGSURF_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace sgsurf {

/// Runs body(chunk) for chunk in [0, chunks) on the worker pool. Chunk boundaries
/// are chosen by the caller, so results written per chunk do not depend on the
/// number of threads. Exceptions from workers are rethrown after all workers join
/// (the one from the lowest chunk wins).
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& body);

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

}  // namespace sgsurf

#endif  // SGSURF_PARALLEL_HPP
