#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace quoteattr {

// Seeded RNG with hand-rolled bounded draws. std::uniform_int_distribution
// and std::shuffle are implementation-defined, which would break the
// same-seed-same-artifacts guarantee across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform in [0, n). Requires n > 0.
    std::size_t below(std::size_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = below(i + 1);
            using std::swap;
            swap(v[i], v[j]);
        }
    }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace quoteattr
