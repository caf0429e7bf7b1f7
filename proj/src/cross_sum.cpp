#include "kcorr/cross_sum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "kcorr/errors.hpp"

namespace kcorr {

namespace {

constexpr int kHermiteTerms = 26;
constexpr long kBoxReach = 7;

double weight(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

void validate(const KernelSpec& k, const Points& pts, std::span<const double> w) {
  if (!pts.empty() && pts.dim() != k.dim()) throw InputError("cross sum: dimension mismatch");
  if (!w.empty() && w.size() != pts.size()) throw InputError("cross sum: weight count mismatch");
  if (k.kind() == KernelKind::linear) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!k.in_domain(pts[i])) throw InputError("linear kernel: point outside the declared domain");
    }
  }
}

double direct(const KernelSpec& k, const Points& xs, std::span<const double> wx, const Points& ys,
              std::span<const double> wy) {
  const std::size_t n = xs.size(), m = ys.size();
  double total = 0.0;
  if (k.dim() == 1 && (k.kind() == KernelKind::gaussian || k.kind() == KernelKind::laplace ||
                       k.kind() == KernelKind::mixture_gaussian)) {
    const double* x = xs.flat().data();
    const double* y = ys.flat().data();
    const bool gauss = k.kind() != KernelKind::laplace;
    const double amp = k.kind() == KernelKind::mixture_gaussian ? k.amplitude() : 1.0;
    const double scale = k.kind() == KernelKind::gaussian ? 0.5 / (k.sigma() * k.sigma())
                         : k.kind() == KernelKind::laplace ? 1.0 / k.beta()
                                                           : 0.5 / k.lengthscale2();
    for (std::size_t a = 0; a < n; ++a) {
      double row = 0.0;
      if (gauss) {
        for (std::size_t b = 0; b < m; ++b) {
          const double d = x[a] - y[b];
          row += weight(wy, b) * std::exp(-d * d * scale);
        }
      } else {
        for (std::size_t b = 0; b < m; ++b) {
          row += weight(wy, b) * std::exp(-std::abs(x[a] - y[b]) * scale);
        }
      }
      total += weight(wx, a) * amp * row;
    }
    return total;
  }
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < m; ++b) row += weight(wy, b) * k.eval_unchecked(xs[a], ys[b]);
    total += weight(wx, a) * row;
  }
  return total;
}

double factorized(const KernelSpec& k, const Points& xs, std::span<const double> wx,
                  const Points& ys, std::span<const double> wy) {
  if (k.kind() == KernelKind::setwise) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a) {
      if (k.contains(xs[a])) sx += weight(wx, a);
    }
    for (std::size_t b = 0; b < ys.size(); ++b) {
      if (k.contains(ys[b])) sy += weight(wy, b);
    }
    return sx * sy;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < k.dim(); ++j) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a) sx += weight(wx, a) * xs[a][j];
    for (std::size_t b = 0; b < ys.size(); ++b) sy += weight(wy, b) * ys[b][j];
    total += sx * sy;
  }
  return total;
}

struct Weighted {
  double x;
  double w;
};

std::vector<Weighted> sorted_weighted(const Points& pts, std::span<const double> w) {
  std::vector<Weighted> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = {pts.scalar(i), weight(w, i)};
  std::sort(out.begin(), out.end(), [](const Weighted& a, const Weighted& b) { return a.x < b.x; });
  return out;
}

// Exact O((n+m) log(n+m)) sum for exp(-|x-y|/beta) on the line.
double sorted_laplace(double beta, const Points& xs, std::span<const double> wx, const Points& ys,
                      std::span<const double> wy) {
  const auto tx = sorted_weighted(xs, wx);
  const auto sy = sorted_weighted(ys, wy);
  double total = 0.0;
  // Sources at or left of each target.
  {
    double s = 0.0, anchor = 0.0;
    std::size_t b = 0;
    for (const auto& t : tx) {
      while (b < sy.size() && sy[b].x <= t.x) {
        s = (b == 0 ? 0.0 : s * std::exp(-(sy[b].x - anchor) / beta)) + sy[b].w;
        anchor = sy[b].x;
        ++b;
      }
      if (b > 0) total += t.w * s * std::exp(-(t.x - anchor) / beta);
    }
  }
  // Sources strictly right of each target.
  {
    double s = 0.0, anchor = 0.0;
    std::size_t b = sy.size();
    for (std::size_t a = tx.size(); a-- > 0;) {
      const auto& t = tx[a];
      while (b > 0 && sy[b - 1].x > t.x) {
        --b;
        s = (b + 1 == sy.size() ? 0.0 : s * std::exp(-(anchor - sy[b].x) / beta)) + sy[b].w;
        anchor = sy[b].x;
      }
      if (b < sy.size()) total += t.w * s * std::exp(-(anchor - t.x) / beta);
    }
  }
  return total;
}

// Hermite expansion of amp * exp(-(x-y)^2 / (2 l2)) about box centres of width sqrt(2 l2).
double gauss_transform(double amp, double l2, const Points& xs, std::span<const double> wx,
                       const Points& ys, std::span<const double> wy) {
  if (xs.empty() || ys.empty()) return 0.0;
  const double h = std::sqrt(2.0 * l2);
  const auto src = sorted_weighted(ys, wy);
  const double origin = src.front().x;

  struct BoxMoments {
    long index;
    double centre;
    std::array<double, kHermiteTerms> a;
  };
  std::vector<BoxMoments> boxes;
  for (const auto& s : src) {
    const long idx = static_cast<long>(std::floor((s.x - origin) / h));
    if (boxes.empty() || boxes.back().index != idx) {
      boxes.push_back({idx, origin + (static_cast<double>(idx) + 0.5) * h, {}});
    }
    auto& box = boxes.back();
    const double u = (s.x - box.centre) / h;
    double term = s.w;
    for (int n = 0; n < kHermiteTerms; ++n) {
      box.a[n] += term;
      term *= u / static_cast<double>(n + 1);
    }
  }

  std::array<double, kHermiteTerms> hf{};
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs.scalar(i);
    const long tb = static_cast<long>(std::floor((x - origin) / h));
    auto it = std::lower_bound(boxes.begin(), boxes.end(), tb - kBoxReach,
                               [](const BoxMoments& b, long v) { return b.index < v; });
    double acc = 0.0;
    for (; it != boxes.end() && it->index <= tb + kBoxReach; ++it) {
      const double t = (x - it->centre) / h;
      hf[0] = std::exp(-t * t);
      hf[1] = 2.0 * t * hf[0];
      for (int n = 1; n + 1 < kHermiteTerms; ++n) {
        hf[n + 1] = 2.0 * t * hf[n] - 2.0 * static_cast<double>(n) * hf[n - 1];
      }
      double s = 0.0;
      for (int n = kHermiteTerms - 1; n >= 0; --n) s += it->a[n] * hf[n];
      acc += s;
    }
    total += weight(wx, i) * acc;
  }
  return amp * total;
}

Points expand_mixture(const KernelSpec& k, const Points& pts, std::span<const double> w,
                      std::vector<double>& w_out) {
  const std::size_t L = k.mc_draws(), d = k.dim();
  const auto& noise = k.mc_noise();
  std::vector<double> flat;
  flat.reserve(pts.size() * L * d);
  w_out.clear();
  w_out.reserve(pts.size() * L);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t a = 0; a < L; ++a) {
      for (std::size_t j = 0; j < d; ++j) flat.push_back(pts[i][j] + k.s0() * noise[a * d + j]);
      w_out.push_back(weight(w, i) / static_cast<double>(L));
    }
  }
  return Points(d, std::move(flat));
}

}  // namespace

std::string to_string(CrossSumPath p) {
  switch (p) {
    case CrossSumPath::direct:
      return "direct";
    case CrossSumPath::factorized:
      return "factorized";
    case CrossSumPath::sorted_laplace:
      return "sorted_laplace";
    case CrossSumPath::gauss_transform:
      return "gauss_transform";
  }
  return "direct";
}

CrossSumPath cross_sum_path(const KernelSpec& k, std::size_t n, std::size_t m,
                            const CrossSumOptions& opts) {
  switch (k.kind()) {
    case KernelKind::linear:
    case KernelKind::setwise:
      return CrossSumPath::factorized;
    case KernelKind::mixture_mc:
      return cross_sum_path(k.base(), n * k.mc_draws(), m * k.mc_draws(), opts);
    default:
      break;
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(m);
  if (!opts.allow_fast || pairs <= opts.fast_threshold || k.dim() != 1) return CrossSumPath::direct;
  return k.kind() == KernelKind::laplace ? CrossSumPath::sorted_laplace
                                         : CrossSumPath::gauss_transform;
}

double weighted_cross_sum(const KernelSpec& k, const Points& xs, std::span<const double> wx,
                          const Points& ys, std::span<const double> wy,
                          const CrossSumOptions& opts) {
  validate(k, xs, wx);
  validate(k, ys, wy);
  if (xs.empty() || ys.empty()) return 0.0;
  if (k.kind() == KernelKind::mixture_mc) {
    std::vector<double> ex_w, ey_w;
    const Points ex = expand_mixture(k, xs, wx, ex_w);
    const Points ey = expand_mixture(k, ys, wy, ey_w);
    return weighted_cross_sum(k.base(), ex, ex_w, ey, ey_w, opts);
  }
  switch (cross_sum_path(k, xs.size(), ys.size(), opts)) {
    case CrossSumPath::factorized:
      return factorized(k, xs, wx, ys, wy);
    case CrossSumPath::sorted_laplace:
      return sorted_laplace(k.beta(), xs, wx, ys, wy);
    case CrossSumPath::gauss_transform:
      return k.kind() == KernelKind::gaussian
                 ? gauss_transform(1.0, k.sigma() * k.sigma(), xs, wx, ys, wy)
                 : gauss_transform(k.amplitude(), k.lengthscale2(), xs, wx, ys, wy);
    case CrossSumPath::direct:
      break;
  }
  return direct(k, xs, wx, ys, wy);
}

double aligned_sum(const KernelSpec& k, const Points& xs, const Points& ys) {
  if (xs.size() != ys.size()) throw InputError("aligned sum: size mismatch");
  validate(k, xs, {});
  validate(k, ys, {});
  double total = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) total += k.eval_unchecked(xs[t], ys[t]);
  return total;
}

}  // namespace kcorr
