#include "kcorr/moments.hpp"

#include <chrono>
#include <cmath>
#include "json.hpp"
#include <numeric>

#include "kcorr/errors.hpp"

namespace kcorr {

std::string to_string(Method m) {
  switch (m) {
    case Method::sampling:
      return "sampling";
    case Method::analytics:
      return "analytics";
    case Method::closed:
      return "closed";
    case Method::measure_mc:
      return "measure_mc";
  }
  return "sampling";
}

void CorrelationReport::finalize() {
  corr_valid = false;
  out_of_range = false;
  if (!(var1 > 0.0) || !(var2 > 0.0)) {
    throw DegenerateVarianceError("kernel variance estimate is not positive (var1=" +
                                  std::to_string(var1) + ", var2=" + std::to_string(var2) + ")");
  }
  corr = cov / std::sqrt(var1 * var2);
  corr_valid = true;
  out_of_range = std::abs(corr) > 1.0;
}

std::string CorrelationReport::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = to_string(method);
  j["kernel"] = kernel;
  j["cov"] = cov;
  j["var1"] = var1;
  j["var2"] = var2;
  if (corr_valid) {
    j["corr"] = corr;
  } else {
    j["corr"] = nullptr;
  }
  j["corr_out_of_range"] = out_of_range;
  j["m"] = m;
  j["r"] = r;
  j["seed"] = seed;
  j["runtime_ms"] = runtime_ms;
  if (!cross_path.empty()) j["cross_sum"] = cross_path;
  return j.dump(2);
}

BlockSet::BlockSet(std::size_t dim) : x11(dim), x21(dim), x12(dim), x22(dim) {}

void BlockSet::push(const PairedBlock& b) {
  x11.push_back(b.x11);
  x21.push_back(b.x21);
  x12.push_back(b.x12);
  x22.push_back(b.x22);
}

void BlockSet::push(double a, double b, double c, double d) {
  x11.push_back(a);
  x21.push_back(b);
  x12.push_back(c);
  x22.push_back(d);
}

void BlockSet::reserve(std::size_t m) {
  x11.reserve(m);
  x21.reserve(m);
  x12.reserve(m);
  x22.reserve(m);
}

PairedBlock BlockSet::block(std::size_t t) const {
  auto vec = [](PointView p) { return Point(p.begin(), p.end()); };
  return {vec(x11[t]), vec(x21[t]), vec(x12[t]), vec(x22[t])};
}

BlockSet BlockSet::swapped() const {
  BlockSet out(dim());
  out.x11 = x21;
  out.x21 = x11;
  out.x12 = x22;
  out.x22 = x12;
  return out;
}

namespace {

double cross_term(const KernelSpec& k, const Points& a, const Points& b,
                  const EstimatorOptions& opts) {
  const std::size_t M = a.size();
  if (opts.subsample_pairs > 0 && M > opts.subsample_above) {
    Rng rng(opts.subsample_seed);
    std::uniform_int_distribution<std::size_t> pick(0, M - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < opts.subsample_pairs; ++i) {
      s += k.eval_unchecked(a[pick(rng)], b[pick(rng)]);
    }
    return s / static_cast<double>(opts.subsample_pairs) * static_cast<double>(M) *
           static_cast<double>(M);
  }
  return weighted_cross_sum(k, a, {}, b, {}, opts.cross);
}

double u_stat(const KernelSpec& k, const Points& a, const Points& b, const EstimatorOptions& opts) {
  const std::size_t M = a.size();
  if (M < 2) throw InputError("estimator needs M >= 2 blocks");
  if (a.dim() != k.dim()) throw InputError("estimator: block dimension does not match kernel");
  const double Md = static_cast<double>(M);
  return aligned_sum(k, a, b) / (Md - 1.0) - cross_term(k, a, b, opts) / (Md * (Md - 1.0));
}

std::string path_label(const KernelSpec& k, std::size_t M, const EstimatorOptions& opts) {
  if (opts.subsample_pairs > 0 && M > opts.subsample_above) {
    return "subsampled:" + std::to_string(opts.subsample_pairs);
  }
  return to_string(cross_sum_path(k, M, M, opts.cross));
}

}  // namespace

double cov_hat(const KernelSpec& k, const BlockSet& blocks, const EstimatorOptions& opts) {
  return u_stat(k, blocks.x11, blocks.x21, opts);
}

double var_hat(const KernelSpec& k, const BlockSet& blocks, int group,
               const EstimatorOptions& opts) {
  if (group == 1) return u_stat(k, blocks.x11, blocks.x12, opts);
  if (group == 2) return u_stat(k, blocks.x21, blocks.x22, opts);
  throw InputError("group must be 1 or 2");
}

CorrelationReport corr_hat(const KernelSpec& k, const BlockSet& blocks,
                           const EstimatorOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  CorrelationReport rep;
  rep.method = Method::sampling;
  rep.m = blocks.size();
  rep.kernel = k.to_string();
  rep.cov = cov_hat(k, blocks, opts);
  rep.var1 = var_hat(k, blocks, 1, opts);
  rep.var2 = var_hat(k, blocks, 2, opts);
  rep.cross_path = path_label(k, blocks.size(), opts);
  rep.finalize();
  rep.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::pair<double, double> ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("ols_fit: need >= 2 paired values");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InputError("ols_fit: constant regressor");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

CltReport estimator_clt_check(const BlockGenerator& generator, const KernelSpec& k,
                              const std::vector<std::size_t>& m_grid, std::size_t replications,
                              std::uint64_t seed, const EstimatorOptions& opts) {
  if (m_grid.size() < 3) throw InputError("clt check needs at least 3 values of M");
  if (replications < 2) throw InputError("clt check needs at least 2 replications");
  CltReport out;
  out.m_grid = m_grid;
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    std::vector<double> est;
    est.reserve(replications);
    for (std::size_t r = 0; r < replications; ++r) {
      Rng rng = make_rng(seed, g * 1000003ULL + r);
      const auto blocks = generator(m_grid[g], rng);
      try {
        est.push_back(corr_hat(k, blocks, opts).corr);
      } catch (const DegenerateVarianceError&) {
        out.degenerate = true;
      }
    }
    double var = 0.0;
    if (est.size() >= 2) {
      const double mean = std::accumulate(est.begin(), est.end(), 0.0) / static_cast<double>(est.size());
      for (double e : est) var += (e - mean) * (e - mean);
      var /= static_cast<double>(est.size() - 1);
    }
    if (!(var > 0.0)) out.degenerate = true;
    out.variances.push_back(var);
  }
  for (std::size_t g = 0; g + 1 < m_grid.size(); ++g) {
    out.ratios.push_back(out.variances[g] > 0.0 ? out.variances[g + 1] / out.variances[g] : 0.0);
  }
  if (out.degenerate) return out;
  std::vector<double> lx, ly;
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    lx.push_back(std::log(static_cast<double>(m_grid[g])));
    ly.push_back(std::log(out.variances[g]));
  }
  const auto [a, b] = ols_fit(lx, ly);
  out.intercept = a;
  out.slope = b;
  for (std::size_t g = 0; g < lx.size(); ++g) out.residuals.push_back(ly[g] - (a + b * lx[g]));
  return out;
}

}  // namespace kcorr
