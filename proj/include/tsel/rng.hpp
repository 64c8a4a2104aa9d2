#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace tsel {

// splitmix64 step; used both as a mixer and to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from a base seed and salts.
// Same (base, salts...) always yields the same seed, on any platform.
inline std::uint64_t derive_seed(std::uint64_t base) {
    std::uint64_t s = base;
    return splitmix64(s);
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt, Rest... rest) {
    std::uint64_t s = base ^ (salt + 0x9E3779B97F4A7C15ULL + (base << 6) + (base >> 2));
    splitmix64(s);
    return derive_seed(s, rest...);
}

// Deterministic RNG with hand-rolled distributions. std:: distributions are
// implementation-defined, which would break byte-identical artifacts across
// standard libraries, so everything here is spelled out.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // warm up so that small seeds do not produce correlated streams
        next();
        next();
    }

    std::uint64_t next() {
        // xorshift* over a splitmix-initialized state
        std::uint64_t z = splitmix64(state_);
        return z;
    }

    // uniform double in [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // standard normal via Box-Muller (first value of the pair only)
    double gauss() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), in selection order
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k && i < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k < n ? k : n);
        return idx;
    }

private:
    std::uint64_t state_;
};

} // namespace tsel
