// Counter-based random streams for reproducible parallel Monte Carlo.
//
// Output i of a stream is a pure function of (master_seed, stream_index, i),
// so trial t can always be bound to stream t no matter which worker runs it,
// and replaying a (master_seed, stream_index, counter) triple is bit-exact.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>

namespace kaclab::coeffs {

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index,
              std::uint64_t counter = 0)
        : master_seed_(master_seed), stream_index_(stream_index), counter_(counter) {
        key_ = mix64(mix64(master_seed_ ^ 0x9E3779B97F4A7C15ull) ^
                     mix64(stream_index_ + 0xD1B54A32D192ED03ull));
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64() {
        return mix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ull);
    }

    // Uniform on [0, 1), 53 bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal pair via Box-Muller; consumes exactly two words.
    std::pair<double, double> next_normal_pair() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    double next_normal() { return next_normal_pair().first; }

    // Standard complex normal: E[xi] = 0, E[|xi|^2] = 1, E[xi^2] = 0.
    std::complex<double> next_complex_normal() {
        auto [re, im] = next_normal_pair();
        return {re * 0.7071067811865475244, im * 0.7071067811865475244};
    }

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t counter_;
    std::uint64_t key_;
};

// FNV-1a, used to derive stream indices from cell identifiers.
inline std::uint64_t fnv1a64(const char* data, std::size_t len) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace kaclab::coeffs
