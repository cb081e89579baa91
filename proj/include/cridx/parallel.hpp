#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace cridx {

/// Worker count: CRIDX_THREADS if set and positive, else the hardware count.
inline unsigned worker_count() {
    if (const char* env = std::getenv("CRIDX_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(in[i]). Output order follows input order regardless of the
/// number of workers. If several calls throw, the exception of the smallest
/// index is rethrown so failures are deterministic too.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& in, Fn fn, unsigned workers = worker_count()) {
    using Out = decltype(fn(in.front()));
    const std::size_t count = in.size();
    std::vector<Out> out(count);
    std::vector<std::exception_ptr> errors(count);
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));

    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = fn(in[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace cridx
