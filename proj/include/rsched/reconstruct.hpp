#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsched/config_space.hpp"
#include "rsched/workload.hpp"

namespace rsched {

enum class RowKind { training, active };

// Sparse ratings matrix: applications as rows, configurations as columns.
struct RatingsMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;          // row-major, rows x cols
  std::vector<unsigned char> observed;  // row-major mask
  std::vector<RowKind> row_kind;

  RatingsMatrix() = default;
  RatingsMatrix(std::size_t rows, std::size_t cols);

  // Appends a row; returns its index.
  std::size_t add_row(RowKind kind);
  std::size_t add_full_row(const std::vector<double>& row);  // training row
  void observe(std::size_t r, std::size_t c, double value);

  bool is_observed(std::size_t r, std::size_t c) const { return observed[r * cols + c] != 0; }
  double value(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::size_t observed_count() const;
  std::size_t observed_in_row(std::size_t r) const;
};

struct SgdParams {
  double eta = 0.05;
  double lambda = 0.02;
  std::size_t max_iter = 2000;
  std::size_t f = 0;  // 0 -> min(4, cols)
  std::uint64_t seed = 1;
};

// R ~ Q * P^T with Q: rows x f (application factors), P: cols x f.
struct FactorModel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t f = 0;
  std::vector<double> Q;
  std::vector<double> P;
  std::vector<double> rmse_history;  // RMSE over observed entries, per epoch

  double predict(std::size_t r, std::size_t c) const;
  nlohmann::json dump() const;  // dimensions + RMSE history
};

std::size_t effective_latent_dim(const SgdParams& params, std::size_t cols);

// One update on a single observed entry r ~ q . p (both vectors of length f).
void sgd_step(double r, double* q, double* p, std::size_t f, double eta, double lambda);

// Serial SGD over observed entries in row-major order. Each step updates the
// application and configuration factors from their values before the step.
FactorModel sgd_fit(const RatingsMatrix& R, const SgdParams& params);

// Lock-free variant: observed entries are dealt round-robin to `workers`
// threads that update the shared factors without mutual exclusion, meeting at
// a barrier after each epoch. workers == 1 runs sgd_fit.
FactorModel parallel_sgd_fit(const RatingsMatrix& R, const SgdParams& params, std::size_t workers);

// Dense completion: observed entries as measured, the rest from the model.
std::vector<double> reconstruct(const FactorModel& model, const RatingsMatrix& R,
                                bool clamp_non_negative = true);

struct CompletionOptions {
  SgdParams sgd;
  std::size_t workers = 1;
  bool log_scale = true;  // fit log(values) instead of values
};

// Fits deviations from the per-column mean of the observed values (after an
// optional log), scaled to [-1, 1], then reconstructs and maps back.
std::vector<double> complete_matrix(const RatingsMatrix& R, const CompletionOptions& options,
                                    FactorModel* model_out = nullptr);

// Fully characterized training applications.
struct TrainingDb {
  std::vector<AppProfile> batch;
  std::vector<AppProfile> latency_critical;
};

// Observations of the applications currently running.
struct ActiveObservations {
  std::size_t batch_apps = 0;
  // Per batch app: (config index, bips).
  std::vector<std::vector<std::pair<std::size_t, double>>> throughput;
  // Per app, batch apps first then LC apps: (core config, watts).
  std::vector<std::vector<std::pair<std::size_t, double>>> power;
  // Per LC app: (config index, tail ms) at the load in `lc_load`.
  std::vector<std::vector<std::pair<std::size_t, double>>> latency;
  std::vector<double> lc_load;
};

struct Reconstructions {
  std::vector<std::vector<double>> throughput;  // per batch app, m*p entries
  std::vector<std::vector<double>> power;       // per app, m entries
  std::vector<std::vector<double>> latency;     // per LC app, m*p entries
  double charged_ms = 0.0;
};

// Builds the three matrices (throughput over batch apps, power with m columns
// over all apps, one latency matrix per LC app) and fits them concurrently.
Reconstructions run_three_reconstructions(const ConfigSpace& space, const TrainingDb& training,
                                          const ActiveObservations& obs,
                                          const CompletionOptions& options, double phase_ms = 4.8);

}  // namespace rsched
