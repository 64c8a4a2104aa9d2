#include "tsel/parallel.hpp"

namespace tsel {

namespace {
std::atomic<int> g_max_threads{0}; // 0 = use hardware concurrency
}

int max_threads() {
    int n = g_max_threads.load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_max_threads(int n) {
    g_max_threads.store(n > 0 ? n : 0);
}

} // namespace tsel
