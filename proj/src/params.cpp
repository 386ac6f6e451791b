#include "racetrack/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace racetrack {

namespace {

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
}

}  // namespace

void ModelParams::validate() const {
    check(std::isfinite(mu) && mu >= 0.0 && mu < 1.0, "mu must be in [0, 1)");
    check(std::isfinite(sigma) && sigma > 1.0, "sigma must be > 1");
    check(std::isfinite(tau) && tau > 0.0, "tau must be > 0");
    check(std::isfinite(F) && F > 0.0, "F must be > 0");
    check(std::isfinite(Phi) && Phi > 0.0, "Phi must be > 0");
}

}  // namespace racetrack
