#include "noncollide/parallel.hpp"

#include <cstdlib>

namespace noncollide {

int default_workers() {
    if (const char* env = std::getenv("NONCOLLIDE_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace noncollide
