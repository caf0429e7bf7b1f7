#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kcorr/cross_sum.hpp"
#include "kcorr/kernels.hpp"
#include "kcorr/moments.hpp"
#include "kcorr/points.hpp"
#include "kcorr/random.hpp"

namespace kcorr {

class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  // total_mass defaults to the weight sum; a stated mass must match it up to summation rounding.
  DiscreteMeasure(Points atoms, std::vector<double> weights);
  DiscreteMeasure(Points atoms, std::vector<double> weights, double total_mass);

  [[nodiscard]] static DiscreteMeasure dirac(PointView x);
  [[nodiscard]] static DiscreteMeasure dirac(double x);
  [[nodiscard]] static DiscreteMeasure empirical(Points atoms);

  [[nodiscard]] const Points& atoms() const { return atoms_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] double total_mass() const { return total_mass_; }
  [[nodiscard]] std::size_t size() const { return weights_.size(); }
  [[nodiscard]] std::size_t dim() const { return atoms_.dim(); }
  [[nodiscard]] bool is_probability() const;

  // Concatenates atoms and averages weights.
  [[nodiscard]] static DiscreteMeasure pooled(const std::vector<const DiscreteMeasure*>& parts);

  void write_csv(std::ostream& os) const;
  [[nodiscard]] static DiscreteMeasure read_csv(std::istream& is);

 private:
  Points atoms_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
};

[[nodiscard]] double double_integral(const KernelSpec& k, const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu, const CrossSumOptions& opts = {});

// int k(x,x) dmu - double_integral(k, mu, mu).
[[nodiscard]] double diag_minus_double(const KernelSpec& k, const DiscreteMeasure& mu,
                                       const CrossSumOptions& opts = {});

using PointSampler = std::function<void(Rng& rng, std::span<double> out)>;

[[nodiscard]] PointSampler dist_sampler(const Dist& d, std::size_t dim = 1);

[[nodiscard]] DiscreteMeasure mc_discretize(const PointSampler& sampler, std::size_t M,
                                            std::size_t dim, Rng& rng);
[[nodiscard]] DiscreteMeasure mc_discretize(const Dist& d, std::size_t M, Rng& rng);

// n^-2 sum_j sum_h dk2(x_j, x_h).
[[nodiscard]] double degeneracy_statistic(const KernelSpec& k, const Points& points,
                                          const CrossSumOptions& opts = {});

using MeasurePair = std::pair<DiscreteMeasure, DiscreteMeasure>;

// U-statistic moments over realizations of (P1, P2).
[[nodiscard]] CorrelationReport moments_from_measure_pairs(const KernelSpec& k,
                                                           const std::vector<MeasurePair>& pairs,
                                                           const CrossSumOptions& opts = {});

// Exact moments for a finitely supported law over pairs: realization t has probability probs[t].
[[nodiscard]] CorrelationReport moments_from_weighted_pairs(const KernelSpec& k,
                                                            const std::vector<MeasurePair>& pairs,
                                                            std::span<const double> probs);

}  // namespace kcorr
