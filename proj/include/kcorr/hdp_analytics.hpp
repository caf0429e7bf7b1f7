#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kcorr/hdp.hpp"
#include "kcorr/kernels.hpp"
#include "kcorr/measures.hpp"
#include "kcorr/moments.hpp"

namespace kcorr {

struct P0Star {
  double w0 = 1.0;
  std::vector<double> wh;
  DiscreteMeasure p0_proxy;
  std::vector<double> dish_atoms;

  [[nodiscard]] static P0Star from_state(const HdpState& state, const HdpParams& params,
                                         DiscreteMeasure proxy);
  // The whole measure as one discrete measure (proxy atoms then dishes).
  [[nodiscard]] DiscreteMeasure as_measure() const;
};

// Kernel integrals against the P0 proxy and the dishes; fixed across Gibbs sweeps.
class AnalyticsContext {
 public:
  AnalyticsContext(const KernelSpec& k, const std::vector<double>& dish_atoms,
                   DiscreteMeasure proxy, const CrossSumOptions& opts = {});

  [[nodiscard]] const KernelSpec& kernel() const { return k_; }
  [[nodiscard]] const DiscreteMeasure& proxy() const { return proxy_; }
  [[nodiscard]] double i_p0() const { return i_p0_; }  // iint k dP0 dP0
  [[nodiscard]] double d_p0() const { return d_p0_; }  // int k(x,x) dP0
  [[nodiscard]] const std::vector<double>& i_p0h() const { return i_p0h_; }
  [[nodiscard]] double g(std::size_t h, std::size_t j) const { return g_[h * K_ + j]; }
  [[nodiscard]] std::size_t num_dishes() const { return K_; }

  // Bilinear form <mu(w0 P0 + sum a_h delta_h), mu(v0 P0 + sum b_h delta_h)>.
  [[nodiscard]] double inner(double w0, std::span<const double> a, double v0,
                             std::span<const double> b) const;
  // sum_h a_h k(X*_h, X*_h) + w0 D_P0.
  [[nodiscard]] double diag(double w0, std::span<const double> a) const;

 private:
  KernelSpec k_;
  DiscreteMeasure proxy_;
  std::size_t K_ = 0;
  double i_p0_ = 0.0;
  double d_p0_ = 0.0;
  std::vector<double> i_p0h_;
  std::vector<double> g_;
};

struct VTerms {
  double v11 = 0.0, v12 = 0.0, v13 = 0.0;
  double v21 = 0.0, v22 = 0.0, v23 = 0.0;
  double v01 = 0.0;
  double p0star_self = 0.0;  // <mu(P0*), mu(P0*)>
};

[[nodiscard]] VTerms v_terms(const HdpState& state, const HdpParams& params,
                             const AnalyticsContext& ctx);
[[nodiscard]] VTerms v_terms(const HdpState& state, const HdpParams& params, const KernelSpec& k,
                             const P0Star& p0star);

struct ConditionalMoments {
  double cov = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
};

// Var_k(P_i | X, T, P0) with P0 integrals taken against P0*; the covariance is identically 0.
[[nodiscard]] ConditionalMoments cond_cov_var_given_tables(const HdpState& state,
                                                           const HdpParams& params,
                                                           const AnalyticsContext& ctx);

struct AnalyticsOptions {
  std::size_t R = 1000;
  std::size_t M = 10000;
  std::size_t burn_in = 100;
  // Average <mu(P0*), mu(P0*)> per sweep instead of forming it from averaged weights.
  bool v02_per_sweep = false;
  std::optional<std::string> diagnostics_csv;
  CrossSumOptions cross;
};

[[nodiscard]] CorrelationReport posterior_corr_analytics(const GroupedData& data,
                                                         const HdpParams& params,
                                                         const KernelSpec& k,
                                                         const AnalyticsOptions& opts,
                                                         std::uint64_t seed);

// Same assembly, but with the Gibbs average replaced by the exact table posterior.
[[nodiscard]] CorrelationReport posterior_corr_enumerated(const GroupedData& data,
                                                          const HdpParams& params,
                                                          const KernelSpec& k, std::size_t M,
                                                          std::uint64_t seed,
                                                          bool v02_per_sweep = false);

struct SamplingOptions {
  std::size_t M = 10000;
  std::size_t burn_in = 100;
  EstimatorOptions estimator;
};

[[nodiscard]] CorrelationReport posterior_corr_sampling(const GroupedData& data,
                                                        const HdpParams& params,
                                                        const KernelSpec& k,
                                                        const SamplingOptions& opts,
                                                        std::uint64_t seed);

// Blocks drawn as posterior_corr_sampling draws them.
[[nodiscard]] BlockSet posterior_blocks(const GroupedData& data, const HdpParams& params,
                                        std::size_t M, std::size_t burn_in, Rng& rng);

}  // namespace kcorr
