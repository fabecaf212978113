#include "gridsim/rng.hpp"

#include <cmath>

namespace gridsim {

double Rng::exponential(double rate) {
    // 1 - unit() lies in (0, 1], so the log is finite.
    return -std::log(1.0 - unit()) / rate;
}

}  // namespace gridsim
