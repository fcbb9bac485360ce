#include "crs/parallel.hpp"

#include <cstdlib>
#include <string>

namespace crs {

unsigned default_workers() {
  if (const char* env = std::getenv("CRS_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace crs
