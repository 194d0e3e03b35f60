#include <cstdlib>
#include <string>

#include "cqed/kernels.hpp"

namespace cqed::simd {

#ifndef CQED_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* t = avx2_kernels(); t != nullptr && cpu_supports(Isa::avx2)) out.push_back(t);
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    if (const char* forced = std::getenv("CQED_ISA"); forced != nullptr && std::string(forced) == "scalar") {
      return &scalar_kernels();
    }
    return available_kernels().back();
  }();
  return *chosen;
}

}  // namespace cqed::simd
