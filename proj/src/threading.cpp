#include "bdbc/threading.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace bdbc {

int worker_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("BDBC_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (...) {
      // malformed value: keep the OpenMP default
    }
  }
  return n;
}

}  // namespace bdbc
