#include "binreg/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace binreg {

int configure_threads_from_env() {
  if (const char* env = std::getenv("BINREG_THREADS")) {
    const std::string_view s(env);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace binreg
