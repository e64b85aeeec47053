#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rofp {

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
/// Tasks must write results only to their own slot; the caller assembles
/// output by index, so scheduling order never affects the result.
/// threads == 0 means hardware concurrency.
template <typename Fn>
void parallel_for(std::size_t count, const Fn& fn, unsigned threads = 0) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    if (threads > count) threads = static_cast<unsigned>(count);

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& w : workers) w.join();
}

} // namespace rofp
