#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsched/config_space.hpp"

namespace rsched {

using LevelPoint = std::array<double, 3>;

// Interpolating cubic RBF surface with a linear polynomial tail:
// s(x) = sum_i w_i |x - c_i|^3 + a0 + a1 x1 + a2 x2 + a3 x3.
struct RbfModel {
  std::vector<LevelPoint> centers;
  std::vector<double> weights;
  std::array<double, 4> poly{};

  nlohmann::json dump() const;
};

// Throws FitError for fewer than 4 points or a singular system (duplicate or
// coplanar centers).
RbfModel fit_rbf(const std::vector<std::pair<LevelPoint, double>>& samples);

double predict(const RbfModel& model, const LevelPoint& x);

LevelPoint level_point(const ConfigSpace& space, std::size_t core);

// Prediction for every core config of `core_class`, in core order.
std::vector<double> predict_class(const RbfModel& model, const ConfigSpace& space, std::size_t core_class);

}  // namespace rsched
