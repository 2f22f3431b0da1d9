#ifndef COGMAC_RNG_HPP
#define COGMAC_RNG_HPP

#include <cstdint>
#include <random>

namespace cogmac {

using Rng = std::mt19937_64;

/// Independent stream identifiers. A stream plus a counter fully determines a seed.
enum class Stream : std::uint64_t {
    Trial = 1,
    LosGeometry = 2,
    Validation = 3,
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seed for item `counter` of `stream` under `master`. Independent of evaluation order,
/// so trials can be scheduled on any number of workers.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t counter) {
    std::uint64_t h = detail::splitmix64(master);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(stream));
    return detail::splitmix64(h ^ counter);
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t counter) {
    return Rng(derive_seed(master, stream, counter));
}

}  // namespace cogmac

#endif  // COGMAC_RNG_HPP
