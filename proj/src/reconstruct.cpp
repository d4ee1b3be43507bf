#include "rsched/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "rsched/error.hpp"
#include "rsched/rng.hpp"

namespace rsched {

RatingsMatrix::RatingsMatrix(std::size_t r, std::size_t c)
    : rows(r), cols(c), values(r * c, 0.0), observed(r * c, 0), row_kind(r, RowKind::training) {}

std::size_t RatingsMatrix::add_row(RowKind kind) {
  values.resize(values.size() + cols, 0.0);
  observed.resize(observed.size() + cols, 0);
  row_kind.push_back(kind);
  return rows++;
}

std::size_t RatingsMatrix::add_full_row(const std::vector<double>& row) {
  if (row.size() != cols) throw DomainError("training row has wrong length");
  const std::size_t r = add_row(RowKind::training);
  for (std::size_t c = 0; c < cols; ++c) observe(r, c, row[c]);
  return r;
}

void RatingsMatrix::observe(std::size_t r, std::size_t c, double value) {
  if (r >= rows || c >= cols) throw DomainError("ratings entry out of range");
  values[r * cols + c] = value;
  observed[r * cols + c] = 1;
}

std::size_t RatingsMatrix::observed_count() const {
  return static_cast<std::size_t>(std::count(observed.begin(), observed.end(), 1));
}

std::size_t RatingsMatrix::observed_in_row(std::size_t r) const {
  return static_cast<std::size_t>(
      std::count(observed.begin() + static_cast<std::ptrdiff_t>(r * cols),
                 observed.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols), 1));
}

double FactorModel::predict(std::size_t r, std::size_t c) const {
  double s = 0.0;
  for (std::size_t k = 0; k < f; ++k) s += Q[r * f + k] * P[c * f + k];
  return s;
}

nlohmann::json FactorModel::dump() const {
  nlohmann::json j;
  j["rows"] = rows;
  j["cols"] = cols;
  j["f"] = f;
  j["rmse_history"] = rmse_history;
  return j;
}

std::size_t effective_latent_dim(const SgdParams& params, std::size_t cols) {
  return params.f == 0 ? std::min<std::size_t>(4, cols) : params.f;
}

void sgd_step(double r, double* q, double* p, std::size_t f, double eta, double lambda) {
  double pred = 0.0;
  for (std::size_t k = 0; k < f; ++k) pred += q[k] * p[k];
  const double err = r - pred;
  for (std::size_t k = 0; k < f; ++k) {
    const double qk = q[k];
    const double pk = p[k];
    q[k] = qk + eta * (err * pk - lambda * qk);
    p[k] = pk + eta * (err * qk - lambda * pk);
  }
}

namespace {

struct Entry {
  std::size_t r, c;
  double v;
};

std::vector<Entry> observed_entries(const RatingsMatrix& R) {
  std::vector<Entry> out;
  for (std::size_t r = 0; r < R.rows; ++r)
    for (std::size_t c = 0; c < R.cols; ++c)
      if (R.is_observed(r, c)) out.push_back({r, c, R.value(r, c)});
  return out;
}

FactorModel init_model(const RatingsMatrix& R, const SgdParams& params) {
  if (R.rows == 0 || R.cols == 0 || R.observed_count() == 0)
    throw DomainError("ratings matrix has no observed entries");
  if (!(params.eta > 0.0)) throw DomainError("learning rate must be positive");
  if (params.lambda < 0.0) throw DomainError("regularization must be non-negative");
  if (params.max_iter == 0) throw DomainError("max_iter must be positive");
  FactorModel m;
  m.rows = R.rows;
  m.cols = R.cols;
  m.f = effective_latent_dim(params, R.cols);
  if (m.f == 0) throw DomainError("latent dimension must be positive");
  Rng rng(params.seed);
  const double hi = 1.0 / std::sqrt(static_cast<double>(m.f));
  m.Q.resize(m.rows * m.f);
  m.P.resize(m.cols * m.f);
  for (auto& v : m.Q) v = rng.uniform(0.0, hi);
  for (auto& v : m.P) v = rng.uniform(0.0, hi);
  return m;
}

double rmse(const FactorModel& m, const std::vector<Entry>& entries) {
  double s = 0.0;
  for (const auto& e : entries) {
    const double d = e.v - m.predict(e.r, e.c);
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(entries.size()));
}

void check_finite(double value, const SgdParams& params) {
  if (!std::isfinite(value)) throw DivergedError("SGD diverged", params.eta);
}

}  // namespace

FactorModel sgd_fit(const RatingsMatrix& R, const SgdParams& params) {
  FactorModel m = init_model(R, params);
  const auto entries = observed_entries(R);
  const std::size_t f = m.f;
  m.rmse_history.reserve(params.max_iter);
  for (std::size_t it = 0; it < params.max_iter; ++it) {
    for (const auto& e : entries)
      sgd_step(e.v, &m.Q[e.r * f], &m.P[e.c * f], f, params.eta, params.lambda);
    const double err = rmse(m, entries);
    check_finite(err, params);
    m.rmse_history.push_back(err);
  }
  return m;
}

FactorModel parallel_sgd_fit(const RatingsMatrix& R, const SgdParams& params, std::size_t workers) {
  if (workers == 0) throw DomainError("workers must be at least 1");
  if (workers == 1) return sgd_fit(R, params);
  FactorModel m = init_model(R, params);
  const auto entries = observed_entries(R);
  const std::size_t f = m.f;
  std::barrier sync(static_cast<std::ptrdiff_t>(workers));

  // Contiguous shards keep each worker's visiting order that of the serial pass.
  auto work = [&](std::size_t w) {
    std::vector<double> q(f), p(f);
    const std::size_t lo = entries.size() * w / workers, hi = entries.size() * (w + 1) / workers;
    for (std::size_t it = 0; it < params.max_iter; ++it) {
      for (std::size_t e = lo; e < hi; ++e) {
        double* qs = &m.Q[entries[e].r * f];
        double* ps = &m.P[entries[e].c * f];
        for (std::size_t k = 0; k < f; ++k) {
          q[k] = std::atomic_ref<double>(qs[k]).load(std::memory_order_relaxed);
          p[k] = std::atomic_ref<double>(ps[k]).load(std::memory_order_relaxed);
        }
        sgd_step(entries[e].v, q.data(), p.data(), f, params.eta, params.lambda);
        for (std::size_t k = 0; k < f; ++k) {
          std::atomic_ref<double>(qs[k]).store(q[k], std::memory_order_relaxed);
          std::atomic_ref<double>(ps[k]).store(p[k], std::memory_order_relaxed);
        }
      }
      sync.arrive_and_wait();
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
  for (auto& t : threads) t.join();
  const double err = rmse(m, entries);
  check_finite(err, params);
  m.rmse_history.push_back(err);
  return m;
}

std::vector<double> reconstruct(const FactorModel& model, const RatingsMatrix& R, bool clamp_non_negative) {
  if (model.rows != R.rows || model.cols != R.cols) throw DomainError("model and matrix shapes differ");
  std::vector<double> out(R.rows * R.cols);
  for (std::size_t r = 0; r < R.rows; ++r)
    for (std::size_t c = 0; c < R.cols; ++c) {
      double v = R.is_observed(r, c) ? R.value(r, c) : model.predict(r, c);
      if (clamp_non_negative) v = std::max(0.0, v);
      out[r * R.cols + c] = v;
    }
  return out;
}

std::vector<double> complete_matrix(const RatingsMatrix& R, const CompletionOptions& options,
                                    FactorModel* model_out) {
  constexpr double kFloor = 1e-12;
  auto forward = [&](double v) { return options.log_scale ? std::log(std::max(v, kFloor)) : v; };
  if (R.observed_count() == 0) throw DomainError("ratings matrix has no observed entries");

  // Column baseline: mean over the observed entries of each column (falling
  // back to the global mean), so the factors only model deviations from it.
  std::vector<double> base(R.cols, 0.0);
  std::vector<std::size_t> count(R.cols, 0);
  double global = 0.0;
  for (std::size_t r = 0; r < R.rows; ++r)
    for (std::size_t c = 0; c < R.cols; ++c)
      if (R.is_observed(r, c)) {
        const double t = forward(R.value(r, c));
        base[c] += t;
        ++count[c];
        global += t;
      }
  global /= static_cast<double>(R.observed_count());
  for (std::size_t c = 0; c < R.cols; ++c) base[c] = count[c] ? base[c] / static_cast<double>(count[c]) : global;

  double spread = 0.0;
  for (std::size_t r = 0; r < R.rows; ++r)
    for (std::size_t c = 0; c < R.cols; ++c)
      if (R.is_observed(r, c)) spread = std::max(spread, std::abs(forward(R.value(r, c)) - base[c]));
  const double scale = spread > 0.0 ? spread : 1.0;

  RatingsMatrix scaled = R;
  for (std::size_t r = 0; r < R.rows; ++r)
    for (std::size_t c = 0; c < R.cols; ++c)
      if (R.is_observed(r, c)) scaled.values[r * R.cols + c] = (forward(R.value(r, c)) - base[c]) / scale;

  FactorModel model = parallel_sgd_fit(scaled, options.sgd, options.workers);
  std::vector<double> out(R.rows * R.cols);
  for (std::size_t r = 0; r < R.rows; ++r)
    for (std::size_t c = 0; c < R.cols; ++c) {
      const std::size_t i = r * R.cols + c;
      if (R.observed[i]) {
        out[i] = R.values[i];
        continue;
      }
      const double t = base[c] + scale * model.predict(r, c);
      out[i] = options.log_scale ? std::exp(t) : std::max(0.0, t);
    }
  if (model_out) *model_out = std::move(model);
  return out;
}

namespace {

std::vector<double> row_of(const std::vector<double>& dense, std::size_t r, std::size_t cols) {
  return {dense.begin() + static_cast<std::ptrdiff_t>(r * cols),
          dense.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)};
}

template <typename Fn>
auto tagged(const char* tag, Fn&& fn) {
  try {
    return fn();
  } catch (const DivergedError& e) {
    throw DivergedError(std::string(tag) + " matrix: SGD diverged", e.eta());
  } catch (const DomainError& e) {
    throw DomainError(std::string(tag) + " matrix: " + e.what());
  }
}

}  // namespace

Reconstructions run_three_reconstructions(const ConfigSpace& space, const TrainingDb& training,
                                          const ActiveObservations& obs,
                                          const CompletionOptions& options, double phase_ms) {
  const std::size_t n = space.size();
  const std::size_t m = space.core_count();
  const std::size_t n_lc = obs.latency.size();
  if (obs.throughput.size() != obs.batch_apps) throw DomainError("throughput observations per batch app expected");
  if (obs.power.size() != obs.batch_apps + n_lc) throw DomainError("power observations per app expected");
  if (obs.lc_load.size() != n_lc) throw DomainError("one load per latency-critical app expected");

  auto fit_throughput = [&] {
    RatingsMatrix R(0, n);
    for (const auto& app : training.batch) R.add_full_row(app.bips);
    const std::size_t first = R.rows;
    for (const auto& entries : obs.throughput) {
      const auto r = R.add_row(RowKind::active);
      for (auto [c, v] : entries) R.observe(r, c, v);
    }
    const auto dense = complete_matrix(R, options);
    std::vector<std::vector<double>> out;
    for (std::size_t a = 0; a < obs.batch_apps; ++a) out.push_back(row_of(dense, first + a, n));
    return out;
  };

  auto fit_power = [&] {
    RatingsMatrix R(0, m);
    for (const auto& app : training.batch) R.add_full_row(app.watts);
    const double lc_load = n_lc ? obs.lc_load.front() : 0.0;
    for (const auto& app : training.latency_critical) {
      std::vector<double> row(m);
      for (std::size_t j = 0; j < m; ++j) row[j] = app.watts_at(j, lc_load);
      R.add_full_row(row);
    }
    const std::size_t first = R.rows;
    for (const auto& entries : obs.power) {
      const auto r = R.add_row(RowKind::active);
      for (auto [c, v] : entries) R.observe(r, c, v);
    }
    const auto dense = complete_matrix(R, options);
    std::vector<std::vector<double>> out;
    for (std::size_t a = 0; a < obs.power.size(); ++a) out.push_back(row_of(dense, first + a, m));
    return out;
  };

  auto fit_latency = [&](std::size_t l) {
    RatingsMatrix R(0, n);
    for (const auto& app : training.latency_critical) {
      std::vector<double> row(n);
      for (std::size_t i = 0; i < n; ++i) row[i] = app.latency_at(i, obs.lc_load[l]);
      R.add_full_row(row);
    }
    const auto r = R.add_row(RowKind::active);
    for (auto [c, v] : obs.latency[l]) R.observe(r, c, v);
    return row_of(complete_matrix(R, options), r, n);
  };

  auto f_tp = std::async(std::launch::async, [&] { return tagged("throughput", fit_throughput); });
  auto f_pw = std::async(std::launch::async, [&] { return tagged("power", fit_power); });
  std::vector<std::future<std::vector<double>>> f_lat;
  for (std::size_t l = 0; l < n_lc; ++l)
    f_lat.push_back(std::async(std::launch::async, [&, l] { return tagged("latency", [&] { return fit_latency(l); }); }));

  Reconstructions out;
  out.throughput = f_tp.get();
  out.power = f_pw.get();
  for (auto& f : f_lat) out.latency.push_back(f.get());
  out.charged_ms = phase_ms;
  return out;
}

}  // namespace rsched
