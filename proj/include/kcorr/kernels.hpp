#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kcorr/points.hpp"
#include "kcorr/random.hpp"

namespace kcorr {

enum class KernelKind { linear, gaussian, laplace, setwise, mixture_gaussian, mixture_mc };

// Axis-aligned half-open box [lo_j, hi_j) in every coordinate.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Location family Y | x used by the Monte-Carlo mixture kernel.
enum class MixtureFamily { dirac, normal };

class KernelSpec {
 public:
  [[nodiscard]] static KernelSpec gaussian(double sigma, std::size_t dim = 1);
  [[nodiscard]] static KernelSpec laplace(double beta, std::size_t dim = 1);
  // <x, y> on the cube [lo, hi]^dim.
  [[nodiscard]] static KernelSpec linear(double lo, double hi, std::size_t dim = 1);
  [[nodiscard]] static KernelSpec setwise(std::vector<Box> boxes, std::size_t dim = 1);
  // 1_A(x) 1_A(y) with A = [a, b)^dim.
  [[nodiscard]] static KernelSpec setwise_interval(double a, double b, std::size_t dim = 1);
  // amplitude * exp(-|x-y|^2 / (2 lengthscale2)); s0 and sigma are kept for the text form.
  [[nodiscard]] static KernelSpec mixture_gaussian(double amplitude, double lengthscale2,
                                                   double s0, double sigma, std::size_t dim = 1);
  // Common-random-number estimate (1/L^2) sum_{a,b} base(x + s0 e_a, y + s0 e_b).
  [[nodiscard]] static KernelSpec mixture_mc(const KernelSpec& base, MixtureFamily family,
                                             double s0, std::size_t L, std::uint64_t seed);

  // Parses the text form, e.g. "gaussian:sigma=1", "linear:domain=[-2,2]",
  // "setwise:a=0,b=0.95", "mixgauss:s0=1,sigma=1",
  // "mixmc:family=normal,s0=1,L=64,seed=7|gaussian:sigma=1". Optional "d=" sets the dimension.
  [[nodiscard]] static KernelSpec parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] KernelKind kind() const { return kind_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] double bound() const { return bound_; }

  [[nodiscard]] double sigma() const { return p0_; }
  [[nodiscard]] double beta() const { return p0_; }
  [[nodiscard]] double amplitude() const { return p0_; }
  [[nodiscard]] double lengthscale2() const { return p1_; }
  [[nodiscard]] double domain_lo() const { return p0_; }
  [[nodiscard]] double domain_hi() const { return p1_; }
  [[nodiscard]] double s0() const { return s0_; }
  [[nodiscard]] const std::vector<Box>& boxes() const { return boxes_; }
  [[nodiscard]] const KernelSpec& base() const { return *base_; }
  [[nodiscard]] MixtureFamily family() const { return family_; }
  [[nodiscard]] std::size_t mc_draws() const { return draws_; }
  [[nodiscard]] const std::vector<double>& mc_noise() const { return noise_; }

  // True for kernels whose embedding separates probability measures.
  [[nodiscard]] bool characteristic() const;

  [[nodiscard]] bool contains(PointView x) const;
  [[nodiscard]] bool in_domain(PointView x) const;

  // Unchecked evaluation; callers validate dimensions.
  [[nodiscard]] double eval_unchecked(PointView x, PointView y) const;

 private:
  KernelKind kind_ = KernelKind::gaussian;
  std::size_t dim_ = 1;
  double bound_ = 1.0;
  double p0_ = 1.0;
  double p1_ = 0.0;
  double s0_ = 0.0;
  double sigma_mix_ = 0.0;
  std::vector<Box> boxes_;
  std::shared_ptr<const KernelSpec> base_;
  MixtureFamily family_ = MixtureFamily::normal;
  std::size_t draws_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> noise_;  // draws_ x dim_ standard normals
};

[[nodiscard]] double eval(const KernelSpec& k, PointView x, PointView y);
[[nodiscard]] double eval(const KernelSpec& k, double x, double y);

// k(x,x) - 2k(x,y) + k(y,y).
[[nodiscard]] double dk2(const KernelSpec& k, PointView x, PointView y);
[[nodiscard]] double dk2(const KernelSpec& k, double x, double y);

// Gaussian kernel smoothed through Normal(., s0^2) on both arguments.
[[nodiscard]] KernelSpec mixture_updated_gaussian(double s0, double sigma);

// Draws Y ~ f(. ; x) into y.
using DensitySampler = std::function<void(PointView x, Rng& rng, std::span<double> y)>;

[[nodiscard]] DensitySampler dirac_sampler();
[[nodiscard]] DensitySampler normal_location_sampler(double s0);

// (1/L) sum_l k(Y1_l, Y2_l) with independent Y_i ~ f(. ; x_i).
[[nodiscard]] double mixture_kernel_mc(const KernelSpec& base, const DensitySampler& sampler,
                                       std::size_t L, PointView x1, PointView x2, Rng& rng);

}  // namespace kcorr
