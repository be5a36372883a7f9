#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace ids {

// Seed mixer (splitmix64). Used for deriving per-trial/per-frame seeds from a
// master seed so that parallel and serial runs draw identical streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(master, a), b);
}

// Deterministic random stream. mt19937_64 is bit-exact across platforms; the
// integer/real mappings are pinned here (not std::uniform_*_distribution,
// whose output is implementation-defined) so encoder and decoder agree on
// offset sequences and schedules.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
        std::uint64_t x;
        do {
            x = eng_();
        } while (x < rem);
        return x % n;
    }

    int symbol(int q) { return static_cast<int>(below(static_cast<std::uint64_t>(q))); }

    // uniform in [0, 1) with 53 random bits
    double real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real() < p; }

    // K with P(K = k) = p^k (1 - p), k >= 0  (inverse transform)
    int geometric(double p) {
        if (p <= 0.0) return 0;
        double u = real();
        while (u == 0.0) u = real();
        return static_cast<int>(std::floor(std::log(u) / std::log(p)));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace ids
