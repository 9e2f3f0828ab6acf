#pragma once

// Deterministic random streams. Sample k of a run with master seed s always
// draws from GaussianStream(child_seed(s, k)), so results are byte-identical
// regardless of how samples are distributed over threads.
//
// The standard library's distribution objects are implementation-defined;
// only the raw mt19937_64 output is pinned by the standard. Uniform and
// Gaussian variates are therefore derived here with fixed arithmetic.

#include <cmath>
#include <cstdint>
#include <random>

namespace qcollide {

// Finalizer of the splitmix64 generator: a high-quality 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent child seed for sample k (golden-ratio increment, then mix).
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t k) {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * (k + 1));
}

class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform on the open interval (0, 1): the top 53 bits of the engine
    // output, centered on the bin midpoint so 0 and 1 are unreachable.
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; both variates of a pair are used.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qcollide
