#include "fbmclt/parallel.hpp"

#include <cstdlib>
#include <string>

namespace fbmclt {

unsigned worker_count() {
  if (const char* env = std::getenv("FBMCLT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace fbmclt
