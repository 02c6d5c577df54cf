#include "rareval/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace rareval {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RAREVAL_THREADS")) {
    int value = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0) return value;
  }
  return omp_get_max_threads();
}

}  // namespace rareval
