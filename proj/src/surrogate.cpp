#include "rsched/surrogate.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "rsched/error.hpp"

namespace rsched {

namespace {

double distance(const LevelPoint& a, const LevelPoint& b) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

double kernel(double r) { return r * r * r; }

}  // namespace

nlohmann::json RbfModel::dump() const {
  nlohmann::json j;
  j["centers"] = centers;
  j["weights"] = weights;
  j["poly"] = poly;
  return j;
}

RbfModel fit_rbf(const std::vector<std::pair<LevelPoint, double>>& samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 4) throw FitError("RBF fit needs at least 4 samples");
  const Eigen::Index size = n + 4;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& xi = samples[static_cast<std::size_t>(i)].first;
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = kernel(distance(xi, samples[static_cast<std::size_t>(j)].first));
    A(i, n) = 1.0;
    A(n, i) = 1.0;
    for (int d = 0; d < 3; ++d) {
      A(i, n + 1 + d) = xi[d];
      A(n + 1 + d, i) = xi[d];
    }
    rhs(i) = samples[static_cast<std::size_t>(i)].second;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  if (lu.rank() < size) throw FitError("RBF system is singular (duplicate or degenerate centers)");
  const Eigen::VectorXd sol = lu.solve(rhs);

  RbfModel m;
  for (const auto& s : samples) m.centers.push_back(s.first);
  m.weights.assign(sol.data(), sol.data() + n);
  for (int k = 0; k < 4; ++k) m.poly[static_cast<std::size_t>(k)] = sol(n + k);
  return m;
}

double predict(const RbfModel& model, const LevelPoint& x) {
  double v = model.poly[0] + model.poly[1] * x[0] + model.poly[2] * x[1] + model.poly[3] * x[2];
  for (std::size_t i = 0; i < model.centers.size(); ++i) v += model.weights[i] * kernel(distance(x, model.centers[i]));
  return v;
}

LevelPoint level_point(const ConfigSpace& space, std::size_t core) {
  const auto code = space.level_code(core);
  return {double(code[0]), double(code[1]), double(code[2])};
}

std::vector<double> predict_class(const RbfModel& model, const ConfigSpace& space, std::size_t core_class) {
  const auto range = space.core_range(core_class);
  std::vector<double> out;
  for (std::size_t core = range.first; core <= range.last; ++core) out.push_back(predict(model, level_point(space, core)));
  return out;
}

}  // namespace rsched
