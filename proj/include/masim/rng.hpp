#ifndef MASIM_RNG_HPP
#define MASIM_RNG_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace masim
{

// One splitmix64 step. Mutates the state and returns the next output word.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Folds a word sequence into a single 64-bit seed. Used to derive per-trial
// seeds from (master seed, trial index) and to hash configurations. Stable
// across runs and platforms.
inline std::uint64_t hash_words(std::initializer_list<std::uint64_t> words)
{
    std::uint64_t state = 0x6A09E667F3BCC908ULL;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t w : words)
    {
        state ^= w;
        out ^= splitmix64(state);
        out = (out << 23) | (out >> 41);
    }
    return out;
}

// Deterministic double-precision draws. std::mt19937_64 is bit-exact per the
// standard; the distributions are hand-rolled because the standard library
// ones are implementation-defined.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform()
    {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    // Circularly symmetric complex Gaussian with E|z|^2 = 1: exponential
    // power, uniform phase.
    std::complex<double> cnormal()
    {
        double amp = std::sqrt(-std::log(1.0 - uniform()));
        double phase = 2.0 * 3.14159265358979323846 * uniform();
        return std::polar(amp, phase);
    }

    std::uint64_t next_word() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

} // namespace masim

#endif
