#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace snlab {

// splitmix64 finalizer, used to derive independent stream seeds
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seed for a named stream; replicate r then uses stream_seed(...) ^ r.
inline std::uint64_t stream_seed(std::uint64_t base, std::string_view tag) {
    return mix64(base ^ mix64(hash_tag(tag)));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

    // uniform on the open interval (0,1)
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() { return normal_(eng_); }
    double exponential() { return exp_(eng_); }
    std::uint64_t bits() { return eng_(); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::exponential_distribution<double> exp_{1.0};
};

}  // namespace snlab
