#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cascadia {

/// Seeded Gaussian noise stream.
///
/// Draws are produced with an explicit Box-Muller transform over mt19937_64
/// so the byte stream depends only on the seed and the number of draws taken,
/// not on the standard library's normal_distribution internals. A draw with
/// sigma == 0 consumes nothing from the engine, so noise-free runs are
/// identical regardless of seed.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed = 0) : engine_(seed) {}

    double gaussian(double sigma) {
        if (sigma == 0.0) return 0.0;
        // uniform in (0,1]; avoids log(0)
        const double u1 = (static_cast<double>(engine_()) + 1.0) / (static_cast<double>(engine_.max()) + 2.0);
        const double u2 = static_cast<double>(engine_()) / (static_cast<double>(engine_.max()) + 1.0);
        const double r = std::sqrt(-2.0 * std::log(u1));
        return sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace cascadia
