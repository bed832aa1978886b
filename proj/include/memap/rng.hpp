#ifndef MEMAP_RNG_HPP
#define MEMAP_RNG_HPP

#include <cstdint>
#include <random>

namespace memap {

    using Rng = std::mt19937_64;

    /// Named substreams spawned from the root seed.
    enum class Stream : std::uint64_t {
        Init = 1,
        Activate = 2,
        Sample = 3,
        Test = 99
    };

    namespace detail {
        constexpr std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }
    } // namespace detail

    /// Counter-based seed derivation: the same (root, stream, a, b) always
    /// yields the same generator, independent of call order.
    constexpr std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0)
    {
        std::uint64_t h = detail::splitmix64(root);
        h = detail::splitmix64(h ^ static_cast<std::uint64_t>(stream));
        h = detail::splitmix64(h ^ a);
        h = detail::splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
        return h;
    }

    inline Rng make_rng(std::uint64_t root, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0)
    {
        return Rng(derive_seed(root, stream, a, b));
    }

} // namespace memap

#endif
