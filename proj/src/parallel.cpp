#include "tunnelsplit/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace tunnelsplit {

namespace {

unsigned from_environment() {
  if (const char* env = std::getenv("TUNNELSPLIT_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

std::atomic<unsigned>& setting() {
  static std::atomic<unsigned> n{from_environment()};
  return n;
}

}  // namespace

unsigned thread_count() { return setting().load(); }

void set_thread_count(unsigned n) { setting().store(n ? n : 1); }

}  // namespace tunnelsplit
