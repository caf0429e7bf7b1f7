#include "kcorr/parametric.hpp"

#include <cmath>
#include <numeric>

#include "kcorr/errors.hpp"

namespace kcorr {

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sqrt_ratio(double sigma2, double denom) { return std::sqrt(sigma2 / denom); }

// Observation variance that yields prior kernel variance u under gaussian(sigma), P0 = N(0, t2).
double s2_for_variance(double u, double q, double sigma2) {
  return 0.5 * sigma2 * (1.0 / ((u + q) * (u + q)) - 1.0);
}

}  // namespace

void GaussParams::validate() const {
  if (!(s2 > 0.0) || !std::isfinite(s2)) throw InputError("s2 must be positive");
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw InputError("tau2 must be positive");
  if (!(rho >= -1.0 && rho <= 1.0)) throw InputError("rho must lie in [-1,1]");
}

GaussPosterior gauss_posterior(const GroupedData& data, const GaussParams& p) {
  p.validate();
  const double n1 = static_cast<double>(data.n(1)), n2 = static_cast<double>(data.n(2));
  const double m1 = mean_of(data.x[0]), m2 = mean_of(data.x[1]);
  const double s2 = p.s2, t2 = p.tau2, r = p.rho, om = 1.0 - r * r;
  const double den = s2 * s2 + (n1 + n2) * s2 * t2 + n1 * n2 * t2 * t2 * om;
  GaussPosterior out;
  const double f = s2 * t2 / den;
  out.sigma[0][0] = f * (s2 + n2 * t2 * om);
  out.sigma[1][1] = f * (s2 + n1 * t2 * om);
  out.sigma[0][1] = out.sigma[1][0] = f * s2 * r;
  out.theta[0] = t2 / den * ((s2 + n2 * t2 * om) * n1 * m1 + s2 * r * n2 * m2);
  out.theta[1] = t2 / den * ((s2 + n1 * t2 * om) * n2 * m2 + s2 * r * n1 * m1);
  return out;
}

double param_posterior_corr(std::size_t n1, std::size_t n2, const GaussParams& p) {
  p.validate();
  const double k = p.tau2 / p.s2 * (1.0 - p.rho * p.rho);
  return p.rho / std::sqrt((1.0 + static_cast<double>(n1) * k) * (1.0 + static_cast<double>(n2) * k));
}

double gauss_variance_identity(double a, double b2, double c2) {
  if (!(a > 0.0)) throw InputError("a must be positive");
  if (!(b2 > 0.0)) throw InputError("b2 must be positive");
  if (!(c2 >= 0.0)) throw InputError("c2 must be nonnegative");
  return a * (1.0 - std::sqrt(b2 / (2.0 * c2 + b2)));
}

double kernel_var_gauss_prior(const GaussParams& p, double sigma) {
  p.validate();
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  const double sg2 = sigma * sigma;
  return sqrt_ratio(sg2, 2.0 * p.s2 + sg2) - sqrt_ratio(sg2, 2.0 * p.tau2 + 2.0 * p.s2 + sg2);
}

double kernel_corr_gauss_prior(const GaussParams& p, double sigma) {
  if (p.tau2 == 0.0) throw DegenerateVarianceError("tau2 = 0: the random measures are deterministic");
  p.validate();
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  const double sg2 = sigma * sigma;
  const double outer = sqrt_ratio(sg2, 2.0 * p.tau2 + 2.0 * p.s2 + sg2);
  const double num = sqrt_ratio(sg2, 2.0 * p.tau2 * (1.0 - p.rho) + 2.0 * p.s2 + sg2) - outer;
  const double den = sqrt_ratio(sg2, 2.0 * p.s2 + sg2) - outer;
  return num / den;
}

double CalibrationTarget::sigma_star() const {
  if (!(v > 0.0 && v < 1.0)) throw InputError("v must lie in (0,1)");
  if (!(t2 > 0.0)) throw InputError("t2 must be positive");
  return std::sqrt(2.0 * t2) / std::sqrt(1.0 / ((1.0 - v) * (1.0 - v)) - 1.0);
}

double CalibrationTarget::resolved_sigma() const {
  return sigma > 0.0 ? sigma : sigma_star() / std::sqrt(2.0);
}

void CalibrationTarget::validate() const {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw FeasibilityError("xi must lie in [0,1]; negative correlations are not calibrated");
  }
  if (sigma < 0.0) throw InputError("sigma must be positive (or 0 for the default)");
  const double star = sigma_star();
  const double s = resolved_sigma();
  if (!(s < star)) {
    throw FeasibilityError("infeasible kernel width: sigma = " + std::to_string(s) +
                           " must be below sigma* = sqrt(2) t / sqrt(1/(1-v)^2 - 1) = " +
                           std::to_string(star));
  }
}

GaussCalibration calibrate_gaussian(const CalibrationTarget& target) {
  target.validate();
  const double sg = target.resolved_sigma(), sg2 = sg * sg;
  const double q = std::sqrt(sg2 / (2.0 * target.t2 + sg2));
  const double s2 = s2_for_variance(target.v, q, sg2);
  const double tau2 = target.t2 - s2;
  if (!(s2 > 0.0) || !(tau2 > 0.0)) throw FeasibilityError("calibration gives nonpositive variances");
  const double rho = (target.t2 - s2_for_variance(target.v * target.xi, q, sg2)) / tau2;
  GaussCalibration out;
  out.params = {s2, tau2, std::min(1.0, std::max(0.0, rho))};
  out.residuals.v_err = std::abs(kernel_var_gauss_prior(out.params, sg) - target.v);
  out.residuals.xi_err = std::abs(kernel_corr_gauss_prior(out.params, sg) - target.xi);
  return out;
}

HdpCalibration calibrate_hdp(const CalibrationTarget& target) {
  target.validate();
  if (target.xi <= 0.0 || target.xi >= 1.0) {
    throw FeasibilityError("hDP calibration needs xi in (0,1): c0 or c diverges at the limits");
  }
  const double sg = target.resolved_sigma(), sg2 = sg * sg;
  const double q = std::sqrt(sg2 / (2.0 * target.t2 + sg2));
  const double A = (1.0 - q) / target.v;
  HdpCalibration out;
  out.c0 = A / target.xi - 1.0;
  out.c = (A - 1.0) / (1.0 - target.xi);
  if (!(out.c0 > 0.0) || !(out.c > 0.0)) throw FeasibilityError("calibration gives nonpositive c or c0");
  const HdpParams hp{out.c, out.c0, Dist::normal(0.0, target.t2)};
  out.residuals.v_err = std::abs(prior_variance_factor(hp) * (1.0 - q) - target.v);
  out.residuals.xi_err = std::abs(prior_corr_closed(hp) - target.xi);
  return out;
}

std::vector<double> gauss_predictive_sample(const GroupedData& data, const GaussParams& p,
                                            int group, std::size_t count, Rng& rng) {
  if (group != 1 && group != 2) throw InputError("group must be 1 or 2");
  const auto post = gauss_posterior(data, p);
  const int i = group - 1;
  std::normal_distribution<double> dist(post.theta[i], std::sqrt(p.s2 + post.sigma[i][i]));
  std::vector<double> out(count);
  for (auto& v : out) v = dist(rng);
  return out;
}

namespace {

std::array<double, 2> draw_theta(const GaussParams& p, Rng& rng) {
  std::normal_distribution<double> n01;
  const double z1 = n01(rng), z2 = n01(rng);
  const double tau = std::sqrt(p.tau2);
  return {tau * z1, tau * (p.rho * z1 + std::sqrt(1.0 - p.rho * p.rho) * z2)};
}

}  // namespace

GroupedData sample_gauss_data(const GaussParams& p, std::size_t n1, std::size_t n2, Rng& rng) {
  p.validate();
  const auto theta = draw_theta(p, rng);
  std::normal_distribution<double> noise(0.0, std::sqrt(p.s2));
  GroupedData d;
  for (std::size_t j = 0; j < n1; ++j) d.x[0].push_back(theta[0] + noise(rng));
  for (std::size_t j = 0; j < n2; ++j) d.x[1].push_back(theta[1] + noise(rng));
  return d;
}

BlockSet sample_gauss_prior_blocks(const GaussParams& p, std::size_t M, Rng& rng) {
  p.validate();
  std::normal_distribution<double> noise(0.0, std::sqrt(p.s2));
  BlockSet blocks;
  blocks.reserve(M);
  for (std::size_t t = 0; t < M; ++t) {
    const auto th = draw_theta(p, rng);
    const double a = th[0] + noise(rng), b = th[1] + noise(rng);
    const double c = th[0] + noise(rng), d = th[1] + noise(rng);
    blocks.push(a, b, c, d);
  }
  return blocks;
}

}  // namespace kcorr
