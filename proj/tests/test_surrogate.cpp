#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rsched/error.hpp"
#include "rsched/sampling.hpp"
#include "rsched/surrogate.hpp"

using namespace rsched;

namespace {

std::vector<LevelPoint> mm3_points() {
  std::vector<LevelPoint> out;
  for (const auto& r : three_mm3_design(3).runs) out.push_back({double(r[0]), double(r[1]), double(r[2])});
  return out;
}

}  // namespace

TEST_CASE("constant data gives a constant surface") {
  std::vector<std::pair<LevelPoint, double>> s;
  for (const auto& p : mm3_points()) s.emplace_back(p, 5.0);
  const auto m = fit_rbf(s);
  CHECK(m.poly[0] == doctest::Approx(5.0));
  for (int k = 1; k < 4; ++k) CHECK(std::abs(m.poly[static_cast<std::size_t>(k)]) < 1e-9);
  for (double w : m.weights) CHECK(std::abs(w) < 1e-9);
  CHECK(predict(m, {0.5, 1.7, 0.2}) == doctest::Approx(5.0));
}

TEST_CASE("affine functions are reproduced exactly") {
  auto f = [](const LevelPoint& x) { return 1.5 - 0.25 * x[0] + 2.0 * x[1] + 0.75 * x[2]; };
  std::vector<std::pair<LevelPoint, double>> s;
  for (const auto& p : mm3_points()) s.emplace_back(p, f(p));
  const auto m = fit_rbf(s);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const LevelPoint x{double(a), double(b), double(c)};
        CHECK(std::abs(predict(m, x) - f(x)) <= 1e-9 * std::abs(f(x)) + 1e-12);
      }
}

TEST_CASE("interpolation at the centers") {
  const auto hs = ConfigSpace::heterogeneous();
  const auto app = generate_synthetic(4, 1, hs, 4).front();
  std::vector<std::pair<LevelPoint, double>> s;
  for (auto core : design_cores(three_mm3_design(3), hs, 1)) s.emplace_back(level_point(hs, core), app.bips[core]);
  const auto m = fit_rbf(s);
  for (const auto& [p, v] : s) CHECK(std::abs(predict(m, p) - v) <= 1e-9 * std::abs(v));
}

TEST_CASE("symmetric design gives a symmetric prediction") {
  // The design and the data are both invariant under swapping x0 and x1.
  std::vector<std::pair<LevelPoint, double>> s;
  for (const auto& p : mm3_points()) s.emplace_back(p, p[0] * p[1] + p[0] + p[1] + 0.5 * p[2]);
  const auto m = fit_rbf(s);
  CHECK(predict(m, {0.5, 1.5, 1.0}) == doctest::Approx(predict(m, {1.5, 0.5, 1.0})).epsilon(1e-9));
  CHECK(predict(m, {0.3, 1.9, 0.4}) == doctest::Approx(predict(m, {1.9, 0.3, 0.4})).epsilon(1e-9));
}

TEST_CASE("held-out big-core throughput from nine samples") {
  const auto hs = ConfigSpace::heterogeneous();
  const auto design = design_cores(three_mm3_design(3), hs, 1);
  for (const auto& app : generate_synthetic(5, 8, hs, 4)) {
    std::vector<std::pair<LevelPoint, double>> s;
    for (auto c : design) s.emplace_back(level_point(hs, c), app.bips[c]);
    const auto m = fit_rbf(s);
    const auto table = predict_class(m, hs, 1);
    REQUIRE(table.size() == 27);
    std::vector<double> err;
    for (std::size_t k = 0; k < 27; ++k) {
      const std::size_t core = 8 + k;
      if (std::find(design.begin(), design.end(), core) != design.end()) continue;
      err.push_back(std::abs(table[k] / app.bips[core] - 1.0));
    }
    REQUIRE(err.size() == 18);
    std::sort(err.begin(), err.end());
    CHECK(err[9] < 0.10);
  }
}

TEST_CASE("degenerate fits are rejected") {
  std::vector<std::pair<LevelPoint, double>> three{{{0, 0, 0}, 1.0}, {{1, 0, 0}, 2.0}, {{0, 1, 0}, 3.0}};
  CHECK_THROWS_AS(fit_rbf(three), FitError);
  // Coplanar centers leave the linear tail undetermined.
  std::vector<std::pair<LevelPoint, double>> flat{{{0, 0, 0}, 1.0}, {{1, 0, 0}, 2.0}, {{0, 1, 0}, 3.0}, {{1, 1, 0}, 4.0}};
  CHECK_THROWS_AS(fit_rbf(flat), FitError);
  auto dup = three;
  dup.push_back({{0, 0, 1}, 1.0});
  dup.push_back({{0, 0, 1}, 1.0});
  CHECK_THROWS_AS(fit_rbf(dup), FitError);
}
