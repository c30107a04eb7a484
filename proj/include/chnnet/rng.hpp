#pragma once

#include <cstdint>
#include <vector>

namespace chn {

// Deterministic 64-bit generator (splitmix64). Every random draw in the
// library goes through this so that a run is reproducible from its seed
// alone, independent of the platform's std::shuffle / distribution details.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    std::size_t next_below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::uint64_t state_;
};

// Purpose tags keep independent random streams (weight init, subset
// selection, per-epoch shuffles) decoupled from one another, so e.g. a
// dense net and a CHN net built from the same seed draw identical W1.
enum class RngPurpose : std::uint64_t {
    InitW1 = 1,
    InitW2 = 2,
    Subset = 3,
    Shuffle = 4,
    Probe = 5,
};

std::uint64_t mix_seed(std::uint64_t seed, RngPurpose purpose, std::uint64_t index = 0);

}  // namespace chn
