#include "kcorr/measures.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kcorr/errors.hpp"
#include "text.hpp"

namespace kcorr {

namespace {

double weight_sum(const std::vector<double>& w) {
  return std::accumulate(w.begin(), w.end(), 0.0);
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Points atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.size() != weights_.size()) throw InputError("measure: atoms/weights length mismatch");
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("measure: weights must be nonnegative");
  }
  total_mass_ = weight_sum(weights_);
}

DiscreteMeasure::DiscreteMeasure(Points atoms, std::vector<double> weights, double total_mass)
    : DiscreteMeasure(std::move(atoms), std::move(weights)) {
  const double tol = std::max(1e-12, 4e-16 * static_cast<double>(weights_.size()));
  if (std::abs(total_mass_ - total_mass) > tol * std::max(1.0, std::abs(total_mass))) {
    throw InputError("measure: weights do not sum to the stated total mass");
  }
  total_mass_ = total_mass;
}

DiscreteMeasure DiscreteMeasure::dirac(PointView x) {
  Points p(x.size());
  p.push_back(x);
  return DiscreteMeasure(std::move(p), {1.0}, 1.0);
}

DiscreteMeasure DiscreteMeasure::dirac(double x) { return dirac(PointView(&x, 1)); }

DiscreteMeasure DiscreteMeasure::empirical(Points atoms) {
  if (atoms.empty()) throw InputError("empirical measure of an empty sample");
  const std::size_t n = atoms.size();
  return DiscreteMeasure(std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                         1.0);
}

bool DiscreteMeasure::is_probability() const { return std::abs(total_mass_ - 1.0) <= 1e-12; }

DiscreteMeasure DiscreteMeasure::pooled(const std::vector<const DiscreteMeasure*>& parts) {
  if (parts.empty()) throw InputError("pooled: no measures");
  const double scale = 1.0 / static_cast<double>(parts.size());
  Points atoms(parts.front()->dim());
  std::vector<double> w;
  double mass = 0.0;
  for (const auto* p : parts) {
    atoms.append(p->atoms());
    for (double v : p->weights()) w.push_back(v * scale);
    mass += p->total_mass() * scale;
  }
  DiscreteMeasure out(std::move(atoms), std::move(w));
  out.total_mass_ = mass;
  return out;
}

void DiscreteMeasure::write_csv(std::ostream& os) const {
  for (std::size_t j = 0; j < dim(); ++j) os << "atom_" << j << ",";
  os << "weight\n";
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < dim(); ++j) os << detail::format_double(atoms_[i][j]) << ",";
    os << detail::format_double(weights_[i]) << "\n";
  }
}

DiscreteMeasure DiscreteMeasure::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("measure csv: missing header");
  const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols < 2) throw InputError("measure csv: need atom columns and a weight column");
  const std::size_t d = cols - 1;
  std::vector<double> flat, w;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = detail::parse_double(cell);
      (c < d ? flat : w).push_back(v);
      ++c;
    }
    if (c != cols) throw InputError("measure csv: ragged row '" + line + "'");
  }
  return DiscreteMeasure(Points(d, std::move(flat)), std::move(w));
}

double double_integral(const KernelSpec& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const CrossSumOptions& opts) {
  if (mu.dim() != k.dim() || nu.dim() != k.dim()) {
    throw InputError("double_integral: dimension mismatch");
  }
  return weighted_cross_sum(k, mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), opts);
}

double diag_minus_double(const KernelSpec& k, const DiscreteMeasure& mu,
                         const CrossSumOptions& opts) {
  if (!mu.is_probability()) throw InputError("diag_minus_double: not a probability measure");
  if (mu.dim() != k.dim()) throw InputError("diag_minus_double: dimension mismatch");
  double diag = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    diag += mu.weights()[a] * eval(k, mu.atoms()[a], mu.atoms()[a]);
  }
  return diag - double_integral(k, mu, mu, opts);
}

PointSampler dist_sampler(const Dist& d, std::size_t dim) {
  return [d, dim](Rng& rng, std::span<double> out) {
    for (std::size_t j = 0; j < dim; ++j) out[j] = d.sample(rng);
  };
}

DiscreteMeasure mc_discretize(const PointSampler& sampler, std::size_t M, std::size_t dim,
                              Rng& rng) {
  if (M == 0) throw InputError("mc_discretize: M must be positive");
  std::vector<double> flat(M * dim);
  for (std::size_t t = 0; t < M; ++t) sampler(rng, std::span<double>(flat.data() + t * dim, dim));
  return DiscreteMeasure(Points(dim, std::move(flat)),
                         std::vector<double>(M, 1.0 / static_cast<double>(M)), 1.0);
}

DiscreteMeasure mc_discretize(const Dist& d, std::size_t M, Rng& rng) {
  return mc_discretize(dist_sampler(d), M, 1, rng);
}

double degeneracy_statistic(const KernelSpec& k, const Points& points,
                            const CrossSumOptions& opts) {
  if (points.empty()) throw InputError("degeneracy_statistic: empty sequence");
  return 2.0 * diag_minus_double(k, DiscreteMeasure::empirical(points), opts);
}

namespace {

CorrelationReport u_statistic_report(const KernelSpec& k, double mean_cov, double mean_v1,
                                     double mean_v2, double cross_cov, double cross_v1,
                                     double cross_v2, std::size_t T) {
  CorrelationReport rep;
  const double f = static_cast<double>(T) / static_cast<double>(T - 1);
  rep.cov = f * (mean_cov - cross_cov);
  rep.var1 = f * (mean_v1 - cross_v1);
  rep.var2 = f * (mean_v2 - cross_v2);
  rep.method = Method::measure_mc;
  rep.m = T;
  rep.kernel = k.to_string();
  return rep;
}

}  // namespace

CorrelationReport moments_from_measure_pairs(const KernelSpec& k,
                                             const std::vector<MeasurePair>& pairs,
                                             const CrossSumOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t T = pairs.size();
  if (T < 2) throw InputError("moments_from_measure_pairs: need at least 2 pairs");
  double s12 = 0.0, s11 = 0.0, s22 = 0.0;
  std::vector<const DiscreteMeasure*> p1, p2;
  for (const auto& [a, b] : pairs) {
    if (!a.is_probability() || !b.is_probability()) {
      throw InputError("moments_from_measure_pairs: pairs must be probability measures");
    }
    s12 += double_integral(k, a, b, opts);
    s11 += double_integral(k, a, a, opts);
    s22 += double_integral(k, b, b, opts);
    p1.push_back(&a);
    p2.push_back(&b);
  }
  const auto m1 = DiscreteMeasure::pooled(p1);
  const auto m2 = DiscreteMeasure::pooled(p2);
  const double inv = 1.0 / static_cast<double>(T);
  auto rep = u_statistic_report(k, s12 * inv, s11 * inv, s22 * inv,
                                double_integral(k, m1, m2, opts), double_integral(k, m1, m1, opts),
                                double_integral(k, m2, m2, opts), T);
  rep.cross_path = to_string(cross_sum_path(k, m1.size(), m2.size(), opts));
  rep.finalize();
  rep.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

CorrelationReport moments_from_weighted_pairs(const KernelSpec& k,
                                              const std::vector<MeasurePair>& pairs,
                                              std::span<const double> probs) {
  if (pairs.size() != probs.size() || pairs.empty()) {
    throw InputError("moments_from_weighted_pairs: one probability per pair required");
  }
  double e12 = 0.0, e11 = 0.0, e22 = 0.0;
  Points a1(k.dim()), a2(k.dim());
  std::vector<double> w1, w2;
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto& [a, b] = pairs[t];
    e12 += probs[t] * double_integral(k, a, b);
    e11 += probs[t] * double_integral(k, a, a);
    e22 += probs[t] * double_integral(k, b, b);
    a1.append(a.atoms());
    a2.append(b.atoms());
    for (double w : a.weights()) w1.push_back(probs[t] * w);
    for (double w : b.weights()) w2.push_back(probs[t] * w);
  }
  const DiscreteMeasure m1(std::move(a1), std::move(w1));
  const DiscreteMeasure m2(std::move(a2), std::move(w2));
  CorrelationReport rep;
  rep.cov = e12 - double_integral(k, m1, m2);
  rep.var1 = e11 - double_integral(k, m1, m1);
  rep.var2 = e22 - double_integral(k, m2, m2);
  rep.method = Method::closed;
  rep.m = pairs.size();
  rep.kernel = k.to_string();
  rep.finalize();
  return rep;
}

}  // namespace kcorr
