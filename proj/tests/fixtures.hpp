#pragma once

#include "nvhedge/processes.hpp"

#include <string>

namespace fixtures {

inline constexpr double kHorizon = 1.0 / 12.0;
inline constexpr int kSteps = 21;

inline nvhedge::EouParams wti(double x0 = 40.0) { return {0.5356, 4.1847, 0.3327, x0, kHorizon}; }

inline nvhedge::PathGrid grid() { return nvhedge::PathGrid::for_horizon(kHorizon, kSteps); }

// Calibrated car models, annual demand-rate coefficients mu0 = A / T and mu1 = B / T.
inline nvhedge::DemandParams sport() {
    return {111155.66 / kHorizon, -185.42 / kHorizon, 11577.37, 2.02, 34543.91, 0.0};
}

inline nvhedge::DemandParams compact() {
    return {151887.67 / kHorizon, 157.41 / kHorizon, 8619.46, 6.59, 20467.10, 0.0};
}

inline nvhedge::DemandParams car(const std::string& name) { return name == "sport" ? sport() : compact(); }

} // namespace fixtures
