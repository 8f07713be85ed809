// SPDX-License-Identifier: Apache-2.0
#include "polya/random.hpp"

#include <atomic>

namespace polya {

namespace {

std::atomic<unsigned> g_threads{0};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

RngSeed RngSeed::derive(std::uint64_t tag) const {
    return {splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ULL)), stream};
}

Rng make_rng(RngSeed s) {
    std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                      static_cast<std::uint32_t>(s.stream), static_cast<std::uint32_t>(s.stream >> 32)};
    return Rng(seq);
}

unsigned default_thread_count() {
    const auto n = g_threads.load();
    if (n != 0) {
        return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_thread_count(unsigned n) {
    g_threads.store(n);
}

} // namespace polya
