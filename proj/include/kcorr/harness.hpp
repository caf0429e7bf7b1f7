#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kcorr/hdp.hpp"
#include "kcorr/hdp_analytics.hpp"
#include "kcorr/kernels.hpp"
#include "kcorr/moments.hpp"
#include "kcorr/parametric.hpp"

namespace kcorr {

// Runs fn(i) for i in [0, n) on up to `workers` threads; results must be written by index.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

// M independent blocks from the hDP prior predictive.
[[nodiscard]] BlockSet prior_blocks(const HdpParams& params, std::size_t M, Rng& rng);

[[nodiscard]] CorrelationReport prior_corr_sampling(const HdpParams& params, const KernelSpec& k,
                                                    std::size_t M, std::uint64_t seed,
                                                    const EstimatorOptions& opts = {});

// Default kernels of the convergence study.
[[nodiscard]] std::vector<KernelSpec> convergence_kernels();

struct ConvergenceConfig {
  HdpParams params{1.0, 1.0, Dist::uniform(0.0, 1.0)};
  std::vector<std::size_t> n1_grid{16, 64, 256};
  std::vector<std::size_t> n2_grid{25, 125, 625};
  std::vector<KernelSpec> kernels = convergence_kernels();
  AnalyticsOptions analytics{};
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // Observations to take nested prefixes from; generated from the model when absent.
  std::optional<GroupedData> data;
};

struct ConvergenceCell {
  std::size_t n1 = 0, n2 = 0;
  std::string kernel;
  double corr = 0.0;
  bool flagged = false;  // degenerate data for this kernel; excluded from the fit
};

struct ConvergenceResult {
  std::vector<ConvergenceCell> cells;
  std::map<std::string, double> slopes;  // kernel text -> log-log slope
  std::string to_csv() const;
};

[[nodiscard]] ConvergenceResult run_convergence(const ConvergenceConfig& cfg);

struct ReplicatedConvergence {
  std::vector<ConvergenceResult> runs;  // one per generated dataset
  std::map<std::string, std::vector<double>> slopes;
  std::map<std::string, double> median_slopes;
};

// run_convergence on `datasets` independent model-generated datasets (seeds seed+0, seed+1, ...).
[[nodiscard]] ReplicatedConvergence run_convergence_replicated(const ConvergenceConfig& cfg,
                                                               std::size_t datasets);

struct StabilityConfig {
  HdpParams params{1.0, 1.0, Dist::uniform(0.0, 1.0)};
  std::vector<double> scales{1e-3, 1.0, 1e3};
  std::vector<double> set_bounds{0.1, 0.5, 0.9};
  std::vector<std::size_t> sizes{0, 10, 100, 1000};
  AnalyticsOptions analytics{};
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::optional<GroupedData> data;
};

struct StabilityCell {
  std::string kernel;
  std::size_t n = 0;
  double corr = 0.0;
  bool flagged = false;
};

struct StabilityResult {
  std::vector<StabilityCell> cells;
  [[nodiscard]] double corr(const std::string& kernel, std::size_t n) const;
  std::string to_csv() const;
};

[[nodiscard]] StabilityResult run_stability(const StabilityConfig& cfg);

struct CompareConfig {
  std::vector<double> xi{0.01, 0.5, 0.99};
  double v = 0.25;
  double t2 = 2.0;
  double sigma = 0.0;  // 0 selects sigma* / sqrt(2)
  std::size_t samples = 10000;
  std::size_t burn_in = 100;
  std::size_t n1 = 200, n2 = 5;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::optional<GroupedData> data;
};

struct CompareResult {
  std::vector<double> xi;
  GroupedData data;
  // Group-2 predictive samples per model, per xi, per independent run (0, 1).
  std::vector<std::vector<double>> gauss_runs[2];
  std::vector<std::vector<double>> hdp_runs[2];
  std::vector<GaussCalibration> gauss_cal;
  std::vector<HdpCalibration> hdp_cal;
  // |mean difference| matrices indexed [row xi][col xi].
  std::vector<std::vector<double>> gg, hh, gh;
  std::string to_csv() const;
  std::string samples_csv() const;
};

// Two independent hDPs with shifted normal bases.
[[nodiscard]] GroupedData sample_two_hdp_data(std::size_t n1, std::size_t n2, Rng& rng);

// Group-2 predictive draws of the hDP, one Gibbs sweep before each draw.
[[nodiscard]] std::vector<double> hdp_predictive_sample(const GroupedData& data,
                                                        const HdpParams& params, int group,
                                                        std::size_t count, std::size_t burn_in,
                                                        Rng& rng);

[[nodiscard]] CompareResult run_compare(const CompareConfig& cfg);

struct EstimatorComparisonConfig {
  HdpParams params{1.0, 1.0, Dist::uniform(0.0, 1.0)};
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  std::size_t n1 = 10, n2 = 10;
  std::size_t repetitions = 100;
  std::size_t R = 10;
  std::size_t proxy_M = 10000;
  std::size_t sampling_M = 10000;
  std::size_t burn_in = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::optional<GroupedData> data;
};

struct Quartiles {
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  [[nodiscard]] double iqr() const { return q3 - q1; }
};

[[nodiscard]] Quartiles quartiles(std::vector<double> v);

struct EstimatorComparisonResult {
  std::vector<double> analytics;
  std::vector<double> sampling;
  Quartiles analytics_q, sampling_q;
  bool degenerate = false;
  std::string to_csv() const;
};

[[nodiscard]] EstimatorComparisonResult run_estimator_comparison(
    const EstimatorComparisonConfig& cfg);

enum class GenModel { hdp, twohdp, gauss };

struct GenConfig {
  GenModel model = GenModel::hdp;
  HdpParams hdp{1.0, 1.0, Dist::uniform(0.0, 1.0)};
  GaussParams gauss{};
  std::size_t n1 = 10, n2 = 10;
  std::uint64_t seed = 1;
};

[[nodiscard]] GroupedData gen_data(const GenConfig& cfg);

// Nested prefixes of data.
[[nodiscard]] GroupedData prefix(const GroupedData& data, std::size_t n1, std::size_t n2);

}  // namespace kcorr
