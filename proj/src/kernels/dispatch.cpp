#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "sgsurf/kernels.hpp"

namespace sgsurf {

std::string to_string(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::Auto: return "auto";
    case KernelIsa::Scalar: return "scalar";
    case KernelIsa::Avx2: return "avx2";
  }
  return "unknown";
}

bool avx2_available() {
#if defined(SGSURF_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

KernelIsa resolve_isa(KernelIsa requested) {
  if (requested == KernelIsa::Auto) {
    if (const char* env = std::getenv("SGSURF_KERNEL")) {
      const std::string_view v(env);
      if (v == "scalar") return KernelIsa::Scalar;
      if (v == "avx2" && avx2_available()) return KernelIsa::Avx2;
    }
    return avx2_available() ? KernelIsa::Avx2 : KernelIsa::Scalar;
  }
  if (requested == KernelIsa::Avx2 && !avx2_available()) {
    throw std::runtime_error("kernel: AVX2 requested but not available on this build/CPU");
  }
  return requested;
}

#ifndef SGSURF_HAVE_AVX2
namespace kernels {
EnumerationResult enumerate_avx2(std::size_t, std::span<const Edge>, std::span<const double>,
                                 bool) {
  throw std::runtime_error("kernel: AVX2 support not compiled in");
}
void exp_nonpositive_avx2(std::span<const double>, std::span<double>) {
  throw std::runtime_error("kernel: AVX2 support not compiled in");
}
}  // namespace kernels
#endif

EnumerationResult enumerate(std::size_t sites, std::span<const Edge> edges,
                            std::span<const double> weights, bool site_means, KernelIsa isa) {
  if (edges.size() != weights.size()) {
    throw std::invalid_argument("enumerate: edge and weight counts differ");
  }
  const KernelIsa chosen = resolve_isa(isa);
  if (chosen == KernelIsa::Avx2 && sites >= 2) {
    return kernels::enumerate_avx2(sites, edges, weights, site_means);
  }
  return kernels::enumerate_scalar(sites, edges, weights, site_means);
}

}  // namespace sgsurf
