#pragma once

#include <cmath>
#include <cstdint>

namespace dyadic {

/// Neumaier-compensated accumulator. All global reductions in this library
/// run through it in a fixed traversal order, so sums are reproducible and
/// cancellation-heavy invariant checks (conservation, adjointness) stay near
/// machine precision.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// SplitMix64 finalizer. Stateless; used to build counter-based streams
/// keyed by (seed, cube), so random draws do not depend on traversal order.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [-1, 1) from a 64-bit hash value.
inline double unit_symmetric(std::uint64_t h) {
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
    return 2.0 * u - 1.0;
}

}  // namespace dyadic
