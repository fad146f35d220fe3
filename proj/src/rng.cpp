#include "ggm/rng.hpp"

#include <cmath>

namespace ggm {

double CounterRng::normal(std::uint64_t index) const {
    double u1 = uniform(2 * index);
    double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace ggm
