#include "rainbench/parallel.h"

#include <cstdlib>
#include <string>

namespace rainbench {

unsigned default_thread_count() {
  if (const char* env = std::getenv("RAINBENCH_THREADS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace rainbench
