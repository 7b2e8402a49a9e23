#ifndef SURROFIT_RNG_HPP
#define SURROFIT_RNG_HPP

#include <cstdint>

namespace surrofit {

namespace detail {
// SplitMix64 finalizer (Steele, Lea, Flood 2014). Full 64-bit avalanche,
// so derived streams do not correlate even for adjacent ids.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
} // namespace detail

/// Seeded 64-bit generator (SplitMix64). The output sequence depends only on
/// the seed, never on platform or library version, which is what makes
/// repeat-level results byte-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1), 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift bounded draw; bias < 2^-64, irrelevant here
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Derive an independent sub-seed from a master seed and up to three stream
/// ids (e.g. repeat index, purpose tag). Same inputs give the same stream on
/// every run, so parallel repeats never depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = detail::mix64(seed ^ 0x6a09e667f3bcc909ull);
    h = detail::mix64(h ^ a);
    h = detail::mix64(h ^ b);
    h = detail::mix64(h ^ c);
    return h;
}

} // namespace surrofit

#endif
