#include "kcport/parallel.hpp"

#include <cstdlib>
#include <string>

namespace kcport {

std::size_t worker_count()
{
  static const std::size_t cached = [] {
    std::size_t requested = 0;
    if (const char* env = std::getenv("KCPORT_THREADS")) {
      try {
        requested = static_cast<std::size_t>(std::stoul(env));
      } catch (...) {
        requested = 0;
      }
    }
    if (requested == 0)
      requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
  }();
  return cached;
}

} // namespace kcport
