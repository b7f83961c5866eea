#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lynx {

/// splitmix64 generator. Small, fast, and (unlike the std distributions)
/// bit-identical on every platform, which the determinism contracts rely on.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n). Rejection sampling, unbiased.
    size_t uniform_index(size_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<size_t>(x % n);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Seed for an independent stream, e.g. one GRASP iteration or one fold.
    static uint64_t derive(uint64_t seed, uint64_t stream) {
        Rng r(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
        r.next_u64();
        return r.next_u64();
    }

private:
    uint64_t state_;
};

}  // namespace lynx
