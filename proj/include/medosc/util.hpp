#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace medosc {

// Worker count for parallel loops. Honours OSC_THREADS when set, otherwise
// falls back to the hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Bodies must only write to slots they own,
// which keeps results independent of the thread count. The first exception
// thrown by a body stops the loop and is rethrown to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// splitmix64 finaliser; used for keyed, order-independent pseudo-randomness.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
constexpr double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small deterministic generator. std::mt19937_64 is portable but the standard
// distributions are not, so draws are made from raw bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }
    double uniform() { return unit_from_bits(next()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

private:
    std::uint64_t state_;
};

// FNV-1a over raw bytes.
std::uint64_t fnv1a(std::span<const std::byte> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace medosc
