#pragma once

// Keyed random streams: a splitmix64 hash of (master_seed, keys...) seeds an
// independent engine per experiment cell, so serial and parallel runs agree.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace lrerm {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream key derived from a master seed and any number of cell identifiers.
inline std::uint64_t stream_key(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t id : ids) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t key) : eng_(key) {}
    Rng(std::uint64_t master, std::initializer_list<std::uint64_t> ids) : eng_(stream_key(master, ids)) {}

    /// Uniform on [0, 1) with 53 random bits; independent of the standard library's distributions.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    /// +1 or -1 with equal probability.
    double sign() { return (eng_() >> 63) != 0 ? 1.0 : -1.0; }
    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace lrerm
