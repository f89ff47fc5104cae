#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tempora {

/// Deterministic random source used everywhere a seed appears in the
/// public API. All draws go through explicit, stdlib-independent
/// algorithms (rejection sampling, Fisher-Yates) so that identical seeds
/// give identical streams on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

    /// Independent stream derived from (seed, stream id).
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1)));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Unbiased draw in [0, n). n must be > 0.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t limit = ~0ull - ~0ull % n;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return v % n;
    }

    /// Uniform double in [0, 1), 53 bits of precision.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    // splitmix64 finalizer; spreads low-entropy seeds before seeding the engine
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace tempora
