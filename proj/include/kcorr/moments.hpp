#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kcorr/cross_sum.hpp"
#include "kcorr/kernels.hpp"
#include "kcorr/points.hpp"
#include "kcorr/random.hpp"

namespace kcorr {

enum class Method { sampling, analytics, closed, measure_mc };

[[nodiscard]] std::string to_string(Method m);

struct CorrelationReport {
  double cov = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  double corr = 0.0;
  bool corr_valid = false;
  bool out_of_range = false;  // |corr| > 1
  Method method = Method::sampling;
  std::size_t m = 0;
  std::size_t r = 0;
  std::uint64_t seed = 0;
  std::string kernel;
  double runtime_ms = 0.0;
  std::string cross_path;  // how the O(M^2) cross sum was evaluated

  // Sets corr from cov/var; throws DegenerateVarianceError if a variance is not positive.
  void finalize();
  [[nodiscard]] std::string to_json() const;
};

struct PairedBlock {
  Point x11, x21, x12, x22;
};

// Column storage for M blocks.
class BlockSet {
 public:
  explicit BlockSet(std::size_t dim = 1);

  void push(const PairedBlock& b);
  void push(double x11, double x21, double x12, double x22);
  void reserve(std::size_t m);

  [[nodiscard]] std::size_t size() const { return x11.size(); }
  [[nodiscard]] std::size_t dim() const { return x11.dim(); }
  [[nodiscard]] PairedBlock block(std::size_t t) const;
  // Groups exchanged in every block.
  [[nodiscard]] BlockSet swapped() const;

  Points x11, x21, x12, x22;
};

struct EstimatorOptions {
  CrossSumOptions cross;
  // When > 0 and M exceeds subsample_above, the cross sum is estimated from this many random pairs.
  std::size_t subsample_pairs = 0;
  std::size_t subsample_above = 20000;
  std::uint64_t subsample_seed = 0;
};

[[nodiscard]] double cov_hat(const KernelSpec& k, const BlockSet& blocks,
                             const EstimatorOptions& opts = {});
[[nodiscard]] double var_hat(const KernelSpec& k, const BlockSet& blocks, int group,
                             const EstimatorOptions& opts = {});
[[nodiscard]] CorrelationReport corr_hat(const KernelSpec& k, const BlockSet& blocks,
                                         const EstimatorOptions& opts = {});

using BlockGenerator = std::function<BlockSet(std::size_t M, Rng& rng)>;

struct CltReport {
  std::vector<std::size_t> m_grid;
  std::vector<double> variances;   // replication variance of corr_hat per M
  std::vector<double> residuals;   // of the log-log fit
  std::vector<double> ratios;      // variances[j+1] / variances[j]
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;
};

[[nodiscard]] CltReport estimator_clt_check(const BlockGenerator& generator, const KernelSpec& k,
                                            const std::vector<std::size_t>& m_grid,
                                            std::size_t replications, std::uint64_t seed,
                                            const EstimatorOptions& opts = {});

// Ordinary least squares y = a + b x; returns {a, b}.
[[nodiscard]] std::pair<double, double> ols_fit(std::span<const double> x,
                                                std::span<const double> y);

}  // namespace kcorr
