#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "kcorr/kernels.hpp"
#include "kcorr/points.hpp"

namespace kcorr {

enum class CrossSumPath { direct, factorized, sorted_laplace, gauss_transform };

[[nodiscard]] std::string to_string(CrossSumPath p);

struct CrossSumOptions {
  // Fast paths for Gaussian / Laplace kernels kick in above this many pairs.
  double fast_threshold = 1e6;
  bool allow_fast = true;
};

// Path weighted_cross_sum would take for inputs of the given sizes.
[[nodiscard]] CrossSumPath cross_sum_path(const KernelSpec& k, std::size_t n, std::size_t m,
                                          const CrossSumOptions& opts = {});

// sum_a sum_b wx_a wy_b k(xs_a, ys_b). Empty weight spans mean unit weights.
[[nodiscard]] double weighted_cross_sum(const KernelSpec& k, const Points& xs,
                                        std::span<const double> wx, const Points& ys,
                                        std::span<const double> wy,
                                        const CrossSumOptions& opts = {});

// sum_t k(xs_t, ys_t) over aligned point sets.
[[nodiscard]] double aligned_sum(const KernelSpec& k, const Points& xs, const Points& ys);

}  // namespace kcorr
