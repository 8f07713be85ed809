// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

namespace polya {

using Rng = std::mt19937_64;

/// (seed, stream) names a reproducible random sequence. Monte Carlo replica
/// i of a run uses stream i.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// A seed for an unrelated purpose (e.g. the forward vs backward half of
    /// a check), obtained by hashing `tag` into the seed.
    RngSeed derive(std::uint64_t tag) const;

    bool operator==(const RngSeed&) const = default;
};

Rng make_rng(RngSeed s);

/// Worker count used by `replicate`; 0 means hardware concurrency.
unsigned default_thread_count();
void set_default_thread_count(unsigned n);

/// Runs fn(i, rng_i) for i in [0, n), where rng_i = make_rng({base.seed, i}).
/// Results come back in index order and do not depend on the number of
/// worker threads.
template <typename Fn>
auto replicate(std::size_t n, RngSeed base, Fn&& fn, unsigned threads = 0)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t, Rng&>> {
    using T = std::invoke_result_t<Fn&, std::size_t, Rng&>;
    std::vector<std::optional<T>> slots(n);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto rng = make_rng({base.seed, i});
            slots[i].emplace(fn(i, rng));
        }
    };
    auto collect = [&] {
        std::vector<T> out;
        out.reserve(n);
        for (auto& s : slots) {
            out.push_back(std::move(*s));
        }
        return out;
    };
    if (threads == 0) {
        threads = default_thread_count();
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n / 64, 1)));
    if (threads <= 1) {
        run_range(0, n);
        return collect();
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(n, t * chunk);
            const std::size_t end = std::min(n, begin + chunk);
            workers.emplace_back([&, t, begin, end] {
                try {
                    run_range(begin, end);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return collect();
}

} // namespace polya
