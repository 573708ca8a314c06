#pragma once

#include <cmath>
#include <cstdint>

namespace stablab {

// Counter-based stream derivation: (master_seed, stream_index) is hashed
// through splitmix64 into the state of a xoshiro256++ generator, so stream i
// is reproducible and statistically independent of stream j regardless of
// how many workers consume them.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::uint64_t x = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
        for (auto& si : s_) si = splitmix64(x);
        // xoshiro must not start from the all-zero state
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    // Standard normal, Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace stablab
