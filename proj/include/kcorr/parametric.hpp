#pragma once

#include <array>
#include <vector>

#include "kcorr/hdp.hpp"
#include "kcorr/moments.hpp"
#include "kcorr/random.hpp"

namespace kcorr {

struct GaussParams {
  double s2 = 1.0;    // observation variance
  double tau2 = 1.0;  // prior scale
  double rho = 0.0;

  void validate() const;
};

struct GaussPosterior {
  std::array<double, 2> theta{};
  std::array<std::array<double, 2>, 2> sigma{};  // posterior covariance
};

[[nodiscard]] GaussPosterior gauss_posterior(const GroupedData& data, const GaussParams& p);

[[nodiscard]] double param_posterior_corr(std::size_t n1, std::size_t n2, const GaussParams& p);

// a (1 - sqrt(b2 / (2 c2 + b2))).
[[nodiscard]] double gauss_variance_identity(double a, double b2, double c2);

// Prior kernel correlation of the Gaussian model under gaussian(sigma).
[[nodiscard]] double kernel_corr_gauss_prior(const GaussParams& p, double sigma);

// Prior kernel variance of each group under gaussian(sigma).
[[nodiscard]] double kernel_var_gauss_prior(const GaussParams& p, double sigma);

struct CalibrationTarget {
  double v = 0.25;
  double xi = 0.5;
  double t2 = 2.0;
  double sigma = 0.0;  // 0 selects sigma_star / sqrt(2)

  [[nodiscard]] double sigma_star() const;
  [[nodiscard]] double resolved_sigma() const;
  void validate() const;
};

struct CalibrationResiduals {
  double v_err = 0.0;
  double xi_err = 0.0;
};

struct GaussCalibration {
  GaussParams params;
  CalibrationResiduals residuals;
};

struct HdpCalibration {
  double c = 1.0;
  double c0 = 1.0;
  CalibrationResiduals residuals;
};

[[nodiscard]] GaussCalibration calibrate_gaussian(const CalibrationTarget& target);
[[nodiscard]] HdpCalibration calibrate_hdp(const CalibrationTarget& target);

[[nodiscard]] std::vector<double> gauss_predictive_sample(const GroupedData& data,
                                                          const GaussParams& p, int group,
                                                          std::size_t count, Rng& rng);

// Draws (theta1, theta2) from the prior, then n_i observations per group.
[[nodiscard]] GroupedData sample_gauss_data(const GaussParams& p, std::size_t n1, std::size_t n2,
                                            Rng& rng);

// M independent 2x2 blocks from the prior of the Gaussian model.
[[nodiscard]] BlockSet sample_gauss_prior_blocks(const GaussParams& p, std::size_t M, Rng& rng);

}  // namespace kcorr
