#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace orbitcert {

// Work-stealing-style indexed parallel map: items claimed by atomic counter,
// results keyed by index so the reduction is deterministic regardless of
// scheduling.
template <class F>
void parallel_for_indexed(std::size_t n, int threads, F&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> ts;
    int k = std::min<int>(threads, static_cast<int>(n));
    ts.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
}

} // namespace orbitcert
