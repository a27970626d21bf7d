#include "gnperc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gnp {

std::size_t effective_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GNPERC_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace gnp
