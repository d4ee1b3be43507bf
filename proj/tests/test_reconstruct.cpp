#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rsched/error.hpp"
#include "rsched/reconstruct.hpp"
#include "rsched/rng.hpp"

using namespace rsched;

namespace {

// Exact rank-2 16 x 27 matrix: 8 fully known training rows, 8 test rows with
// two observations each.
struct RankTwo {
  RatingsMatrix R{0, 27};
  std::vector<double> truth;  // row-major 16 x 27
};

RankTwo rank_two(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::array<double, 2>> u(16), v(27);
  for (auto& x : u) x = {rng.uniform(0.5, 1.5), rng.uniform(0.0, 1.0)};
  for (auto& x : v) x = {rng.uniform(0.5, 1.5), rng.uniform(0.0, 1.0)};
  RankTwo out;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 27; ++j) out.truth.push_back(u[i][0] * v[j][0] + u[i][1] * v[j][1]);
  for (std::size_t i = 0; i < 8; ++i)
    out.R.add_full_row(std::vector<double>(out.truth.begin() + static_cast<long>(i * 27), out.truth.begin() + static_cast<long>(i * 27 + 27)));
  for (std::size_t i = 8; i < 16; ++i) {
    const auto r = out.R.add_row(RowKind::active);
    const auto a = static_cast<std::size_t>(rng.below(27));
    std::size_t b = a;
    while (b == a) b = static_cast<std::size_t>(rng.below(27));
    out.R.observe(r, a, out.truth[i * 27 + a]);
    out.R.observe(r, b, out.truth[i * 27 + b]);
  }
  return out;
}

std::vector<double> hidden_errors(const RankTwo& inst, const std::vector<double>& dense) {
  std::vector<double> err;
  for (std::size_t i = 8; i < 16; ++i)
    for (std::size_t j = 0; j < 27; ++j)
      if (!inst.R.is_observed(i, j)) err.push_back(dense[i * 27 + j] / inst.truth[i * 27 + j] - 1.0);
  return err;
}

double hidden_rmse(const RankTwo& inst, const std::vector<double>& dense) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 8; i < 16; ++i)
    for (std::size_t j = 0; j < 27; ++j)
      if (!inst.R.is_observed(i, j)) {
        const double d = dense[i * 27 + j] - inst.truth[i * 27 + j];
        s += d * d;
        ++n;
      }
  return std::sqrt(s / static_cast<double>(n));
}

}  // namespace

TEST_CASE("one hand-run update") {
  double q = 1.0, p = 1.0;
  sgd_step(2.0, &q, &p, 1, 0.1, 0.0);
  CHECK(q == doctest::Approx(1.1));
  CHECK(p == doctest::Approx(1.1));
  // Both factors move from their values before the step.
  double q2[2] = {1.0, 0.0}, p2[2] = {0.5, 2.0};
  sgd_step(1.0, q2, p2, 2, 0.1, 0.5);
  // eps = 1 - 0.5 = 0.5
  CHECK(q2[0] == doctest::Approx(1.0 + 0.1 * (0.5 * 0.5 - 0.5 * 1.0)));
  CHECK(q2[1] == doctest::Approx(0.0 + 0.1 * (0.5 * 2.0 - 0.0)));
  CHECK(p2[0] == doctest::Approx(0.5 + 0.1 * (0.5 * 1.0 - 0.5 * 0.5)));
  CHECK(p2[1] == doctest::Approx(2.0 + 0.1 * (0.5 * 0.0 - 0.5 * 2.0)));
}

TEST_CASE("scalar factorization converges") {
  RatingsMatrix R(0, 1);
  R.add_full_row({0.7});
  SgdParams p;
  p.f = 1;
  p.lambda = 0.0;
  const auto m = sgd_fit(R, p);
  CHECK(std::abs(m.predict(0, 0) - 0.7) < 1e-3);
}

TEST_CASE("fit is deterministic and ends non-increasing") {
  const auto inst = rank_two(3);
  const auto a = sgd_fit(inst.R, SgdParams{});
  const auto b = sgd_fit(inst.R, SgdParams{});
  CHECK(a.Q == b.Q);
  CHECK(a.P == b.P);
  REQUIRE(a.rmse_history.size() == SgdParams{}.max_iter);
  const std::size_t tail = a.rmse_history.size() / 10;
  for (std::size_t k = a.rmse_history.size() - tail; k < a.rmse_history.size(); ++k)
    CHECK(a.rmse_history[k] <= a.rmse_history[k - 1] * (1.0 + 1e-6));
}

TEST_CASE("rank-2 matrix is recovered from two observations per row") {
  std::vector<double> pooled;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = rank_two(seed);
    SgdParams p;
    p.f = 4;
    const auto m = sgd_fit(inst.R, p);
    for (double e : hidden_errors(inst, reconstruct(m, inst.R))) pooled.push_back(std::abs(e));
  }
  std::sort(pooled.begin(), pooled.end());
  CHECK(pooled[pooled.size() / 2] < 0.05);
}

TEST_CASE("observed entries take precedence") {
  const auto inst = rank_two(2);
  RatingsMatrix full(0, 27);
  for (std::size_t i = 0; i < 4; ++i)
    full.add_full_row(std::vector<double>(inst.truth.begin() + static_cast<long>(i * 27), inst.truth.begin() + static_cast<long>(i * 27 + 27)));
  const auto dense = complete_matrix(full, CompletionOptions{});
  for (std::size_t k = 0; k < dense.size(); ++k) CHECK(dense[k] == inst.truth[k]);

  auto model = sgd_fit(inst.R, SgdParams{});
  const auto out = reconstruct(model, inst.R);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 27; ++j) {
      if (inst.R.is_observed(i, j)) CHECK(out[i * 27 + j] == inst.R.value(i, j));
      CHECK(out[i * 27 + j] >= 0.0);
    }
}

TEST_CASE("clamping keeps completed throughput non-negative") {
  RatingsMatrix R(0, 3);
  R.add_full_row({1.0, 0.0, 0.0});
  R.add_full_row({0.0, 0.0, 1.0});
  const auto r = R.add_row(RowKind::active);
  R.observe(r, 0, 2.0);
  SgdParams p;
  p.f = 2;
  p.max_iter = 200;
  const auto m = sgd_fit(R, p);
  for (double v : reconstruct(m, R, true)) CHECK(v >= 0.0);
}

TEST_CASE("lock-free parallel fit") {
  const auto inst = rank_two(5);
  SgdParams p;
  p.f = 4;
  const auto serial = sgd_fit(inst.R, p);
  const auto one = parallel_sgd_fit(inst.R, p, 1);
  CHECK(one.Q == serial.Q);
  CHECK(one.P == serial.P);
  const auto four = parallel_sgd_fit(inst.R, p, 4);
  const double rs = hidden_rmse(inst, reconstruct(serial, inst.R));
  const double rp = hidden_rmse(inst, reconstruct(four, inst.R));
  CHECK(std::abs(rp - rs) <= 0.02 * rs + 1e-3);
  CHECK_THROWS_AS(parallel_sgd_fit(inst.R, p, 0), DomainError);
}

TEST_CASE("divergence and bad parameters are reported") {
  const auto inst = rank_two(1);
  SgdParams p;
  p.eta = 50.0;
  CHECK_THROWS_AS(sgd_fit(inst.R, p), DivergedError);
  p.eta = 0.0;
  CHECK_THROWS_AS(sgd_fit(inst.R, p), DomainError);
  CHECK_THROWS_AS(sgd_fit(RatingsMatrix(2, 3), SgdParams{}), DomainError);
}

TEST_CASE("three reconstructions share the training identities") {
  const auto space = ConfigSpace::homogeneous();
  GeneratorOptions o;
  o.seed = 4;
  o.n_batch = 6;
  o.n_lc = 3;
  const auto apps = generate_synthetic(o, space);
  TrainingDb db;
  db.batch.assign(apps.begin(), apps.begin() + 4);
  db.latency_critical.assign(apps.begin() + 6, apps.begin() + 8);
  const auto& lc = apps.back();

  ActiveObservations obs;
  obs.batch_apps = 2;
  for (std::size_t a = 4; a < 6; ++a) {
    obs.throughput.push_back({{0, apps[a].bips[0]}, {107, apps[a].bips[107]}});
    obs.power.push_back({{0, apps[a].watts_at(0)}, {26, apps[a].watts_at(26)}});
  }
  obs.power.push_back({{0, lc.watts_at(0, 0.5)}});
  obs.latency.push_back({{0, lc.latency_at(0, 0.5)}, {107, lc.latency_at(107, 0.5)}});
  obs.lc_load.push_back(0.5);

  const auto rec = run_three_reconstructions(space, db, obs, CompletionOptions{}, 4.8);
  REQUIRE(rec.throughput.size() == 2);
  REQUIRE(rec.power.size() == 3);
  REQUIRE(rec.latency.size() == 1);
  for (const auto& row : rec.throughput) CHECK(row.size() == 108);
  for (const auto& row : rec.power) CHECK(row.size() == 27);
  CHECK(rec.latency[0].size() == 108);
  CHECK(rec.throughput[1][107] == apps[5].bips[107]);
  CHECK(rec.power[0][26] == apps[4].watts_at(26));
  CHECK(rec.latency[0][0] == lc.latency_at(0, 0.5));
  CHECK(rec.charged_ms == 4.8);
  for (const auto& row : rec.throughput)
    for (double v : row) CHECK(v >= 0.0);

  obs.lc_load.clear();
  CHECK_THROWS_AS(run_three_reconstructions(space, db, obs, CompletionOptions{}), DomainError);
}
