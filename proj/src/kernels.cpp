#include "gnm/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace gnm::kern {

bool avx2_available() {
#if defined(__x86_64__) && defined(__GNUC__)
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

namespace {

const Ops& resolve() {
  const char* want = std::getenv("GNM_KERNELS");
  if (want != nullptr) {
    if (std::strcmp(want, "scalar") == 0) return scalar_ops();
    if (std::strcmp(want, "avx2") == 0 && avx2_available()) return avx2_ops();
  }
  return avx2_available() ? avx2_ops() : scalar_ops();
}

}  // namespace

const Ops& active() {
  static const Ops& ops = resolve();
  return ops;
}

std::string active_name() { return active().name; }

}  // namespace gnm::kern
