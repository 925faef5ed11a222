#ifndef SGSURF_KERNELS_HPP
#define SGSURF_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sgsurf {

/// Bond list in kernel form: pairs of site indices.
using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Exact Boltzmann sums over all 2^sites configurations of
/// exp(sum_b w_b s_a s_b), shifted by the maximal exponent.
struct EnumerationResult {
  double log_z = 0.0;
  std::vector<double> bond_means;  // omega(s_a s_b), aligned with the edge list
  std::vector<double> site_means;  // omega(s_n), empty unless requested
};

enum class KernelIsa { Auto, Scalar, Avx2 };

std::string to_string(KernelIsa isa);

/// True when the AVX2 kernel was compiled in and the CPU supports AVX2+FMA.
bool avx2_available();

/// Resolves Auto to the best available ISA; honours SGSURF_KERNEL=scalar|avx2.
KernelIsa resolve_isa(KernelIsa requested);

namespace kernels {

/// Reference kernel: Gray-code walk over every spin, plain libm exp.
EnumerationResult enumerate_scalar(std::size_t sites, std::span<const Edge> edges,
                                   std::span<const double> weights, bool site_means);

/// Four configurations of the two lowest spins per AVX2 lane group.
EnumerationResult enumerate_avx2(std::size_t sites, std::span<const Edge> edges,
                                 std::span<const double> weights, bool site_means);

/// Vector exp used by the AVX2 kernel, exposed for equivalence tests.
/// Valid for x <= 0; results below exp(-708) flush to zero.
void exp_nonpositive_avx2(std::span<const double> x, std::span<double> out);

}  // namespace kernels

EnumerationResult enumerate(std::size_t sites, std::span<const Edge> edges,
                            std::span<const double> weights, bool site_means,
                            KernelIsa isa = KernelIsa::Auto);

}  // namespace sgsurf

#endif  // SGSURF_KERNELS_HPP
