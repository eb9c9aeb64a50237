#pragma once

#include "fxts/core.hpp"

namespace fxts {

// The planar benchmark plant
//   x1' = x2 + x1 (x1^2 + x2^2 - 1) + x1 u
//   x2' = -x1 + zeta(x2) (x1^2 + x2^2 - 1) + x2 u
// with zeta(z) = (0.8 + 0.2 exp(-100 |z|)) tanh(z). The goal set is the unit
// disk, h(x) = |x|^2 - 1. Outside the disk the open loop spirals away, so the
// goal is only reachable under feedback.
double case_study_zeta(double z);

SystemModel case_study_model();
GoalSpec case_study_goal();

}  // namespace fxts
