#include "coha/parallel.hpp"

namespace coha {

namespace {
unsigned g_threads = 0;
}

unsigned thread_count() {
    if (g_threads > 0) return g_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void set_thread_count(unsigned n) { g_threads = n; }

}  // namespace coha
