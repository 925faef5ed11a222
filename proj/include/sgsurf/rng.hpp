#ifndef SGSURF_RNG_HPP
#define SGSURF_RNG_HPP

#include <array>
#include <cstdint>

namespace sgsurf {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output is a pure function of (key, counter).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Purpose tags keep streams drawn for different roles disjoint.
enum class StreamTag : std::uint32_t { Coupling = 1, Chain = 2, Swap = 3 };

/// Standard normal, deterministic in (seed, tag, index, position).
double counter_normal(std::uint64_t seed, StreamTag tag, std::uint64_t index,
                      std::uint32_t position);

/// Mixes a base seed with two context words (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Sequential uniform stream over a counter-based generator.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t stream_id);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  std::uint64_t next_u64();

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_id_;
  std::uint32_t tag_;
  std::uint32_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace sgsurf

#endif  // SGSURF_RNG_HPP
