#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace sidonlab {

namespace detail {
inline unsigned& thread_cap() {
    static unsigned value = 0;
    return value;
}
}  // namespace detail

/// Caps the worker count of every parallel map. 0 means hardware concurrency.
inline void set_thread_count(unsigned threads) { detail::thread_cap() = threads; }

inline unsigned thread_count() {
    const unsigned cap = detail::thread_cap();
    if (cap != 0) return cap;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(0..count-1) and returns the results in index order. Work is
/// handed out dynamically but each slot is written by exactly one task, so
/// the output does not depend on the schedule.
template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    static_assert(!std::is_same_v<R, bool>, "std::vector<bool> slots are not independently writable");
    std::vector<R> out(count);
    const std::size_t workers = std::min<std::size_t>(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

inline constexpr std::size_t kReductionChunk = std::size_t{1} << 14;

/// Sum of term(i) over [0, count). Chunk boundaries are fixed and chunk
/// partials are added in chunk order, so the rounding is identical for any
/// thread count.
template <class Term>
double chunked_sum(std::size_t count, Term&& term) {
    const std::size_t chunks = (count + kReductionChunk - 1) / kReductionChunk;
    auto partial = [&](std::size_t c) {
        const std::size_t lo = c * kReductionChunk;
        const std::size_t hi = std::min(count, lo + kReductionChunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    };
    if (chunks <= 1) return chunks == 0 ? 0.0 : partial(0);
    const auto parts = parallel_map(chunks, partial);
    double s = 0.0;
    for (double p : parts) s += p;
    return s;
}

/// Maximum of term(i) over [0, count); -infinity-free (returns 0 for empty).
template <class Term>
double chunked_max(std::size_t count, Term&& term) {
    const std::size_t chunks = (count + kReductionChunk - 1) / kReductionChunk;
    auto partial = [&](std::size_t c) {
        const std::size_t lo = c * kReductionChunk;
        const std::size_t hi = std::min(count, lo + kReductionChunk);
        double m = term(lo);
        for (std::size_t i = lo + 1; i < hi; ++i) m = std::max(m, term(i));
        return m;
    };
    if (chunks == 0) return 0.0;
    if (chunks == 1) return partial(0);
    const auto parts = parallel_map(chunks, partial);
    return *std::max_element(parts.begin(), parts.end());
}

}  // namespace sidonlab
