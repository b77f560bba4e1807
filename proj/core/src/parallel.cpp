#include "hjs/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hjs {

std::size_t default_thread_count() {
    if (const char* env = std::getenv("HJS_THREADS")) {
        try {
            const long long value = std::stoll(env);
            if (value > 0) {
                return static_cast<std::size_t>(value);
            }
        } catch (const std::exception&) {
            // fall through to hardware concurrency
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace hjs
