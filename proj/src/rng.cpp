#include "chnnet/rng.hpp"

namespace chn {

namespace {

std::uint64_t splitmix_once(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, RngPurpose purpose, std::uint64_t index) {
    std::uint64_t h = splitmix_once(seed);
    h = splitmix_once(h ^ static_cast<std::uint64_t>(purpose));
    h = splitmix_once(h ^ index);
    return h;
}

}  // namespace chn
