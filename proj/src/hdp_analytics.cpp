#include "kcorr/hdp_analytics.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "kcorr/errors.hpp"

namespace kcorr {

P0Star P0Star::from_state(const HdpState& state, const HdpParams& params, DiscreteMeasure proxy) {
  P0Star out;
  const double denom = params.c0 + static_cast<double>(state.ell_total());
  out.w0 = params.c0 / denom;
  out.wh.resize(state.num_dishes());
  for (std::size_t h = 0; h < out.wh.size(); ++h) {
    out.wh[h] = static_cast<double>(state.ell_h(h)) / denom;
  }
  out.p0_proxy = std::move(proxy);
  out.dish_atoms = state.dishes();
  return out;
}

DiscreteMeasure P0Star::as_measure() const {
  Points atoms(p0_proxy.dim());
  atoms.append(p0_proxy.atoms());
  std::vector<double> w;
  for (double v : p0_proxy.weights()) w.push_back(w0 * v);
  for (std::size_t h = 0; h < dish_atoms.size(); ++h) {
    atoms.push_back(dish_atoms[h]);
    w.push_back(wh[h]);
  }
  return DiscreteMeasure(std::move(atoms), std::move(w));
}

AnalyticsContext::AnalyticsContext(const KernelSpec& k, const std::vector<double>& dish_atoms,
                                   DiscreteMeasure proxy, const CrossSumOptions& opts)
    : k_(k), proxy_(std::move(proxy)), K_(dish_atoms.size()) {
  if (k.dim() != 1 || proxy_.dim() != 1) throw InputError("hDP analytics: kernel must be 1-D");
  if (!proxy_.is_probability()) throw InputError("hDP analytics: proxy must be a probability");
  i_p0_ = double_integral(k_, proxy_, proxy_, opts);
  for (std::size_t t = 0; t < proxy_.size(); ++t) {
    d_p0_ += proxy_.weights()[t] * eval(k_, proxy_.atoms()[t], proxy_.atoms()[t]);
  }
  const Points dishes = Points::scalars(dish_atoms);
  i_p0h_.resize(K_);
  for (std::size_t h = 0; h < K_; ++h) {
    Points one(1);
    one.push_back(dishes[h]);
    i_p0h_[h] = weighted_cross_sum(k_, proxy_.atoms(), proxy_.weights(), one, {}, opts);
  }
  g_.resize(K_ * K_);
  for (std::size_t h = 0; h < K_; ++h) {
    for (std::size_t j = 0; j < K_; ++j) g_[h * K_ + j] = eval(k_, dishes[h], dishes[j]);
  }
}

double AnalyticsContext::inner(double w0, std::span<const double> a, double v0,
                               std::span<const double> b) const {
  double s = w0 * v0 * i_p0_;
  for (std::size_t h = 0; h < K_; ++h) s += (w0 * b[h] + v0 * a[h]) * i_p0h_[h];
  for (std::size_t h = 0; h < K_; ++h) {
    if (a[h] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < K_; ++j) row += g_[h * K_ + j] * b[j];
    s += a[h] * row;
  }
  return s;
}

double AnalyticsContext::diag(double w0, std::span<const double> a) const {
  double s = w0 * d_p0_;
  for (std::size_t h = 0; h < K_; ++h) s += a[h] * g_[h * K_ + h];
  return s;
}

namespace {

// V-terms for P0* weights (w0, wh) and the fixed empirical measures of the state.
VTerms v_terms_for_weights(const HdpState& state, const HdpParams& params,
                           const AnalyticsContext& ctx, double w0, std::span<const double> wh,
                           double ell_total) {
  const double c = params.c, c0 = params.c0;
  VTerms v;
  const double self = ctx.inner(w0, wh, w0, wh);
  const double dstar = ctx.diag(w0, wh);
  const double dd00 = 2.0 * (dstar - self);
  v.p0star_self = self;
  v.v01 = self + dd00 / (2.0 * (c0 + ell_total + 1.0));
  const std::size_t K = ctx.num_dishes();
  std::vector<double> phat(K);
  for (int g = 1; g <= 2; ++g) {
    const double n = static_cast<double>(state.n(g));
    const double denom = (c + n + 1.0) * (c + n) * (c + n);
    const double t1 = 0.5 * c * c / denom * (1.0 - 1.0 / (c0 + ell_total + 1.0)) * dd00;
    double t2 = 0.0, t3 = 0.0;
    if (state.n(g) > 0) {
      for (std::size_t h = 0; h < K; ++h) phat[h] = static_cast<double>(state.n_ih(g, h)) / n;
      const double dp = ctx.diag(0.0, phat);
      const double dd0i = dstar + dp - 2.0 * ctx.inner(w0, wh, 0.0, phat);
      const double ddii = 2.0 * (dp - ctx.inner(0.0, phat, 0.0, phat));
      t2 = c * n / denom * dd0i;
      t3 = 0.5 * n * n / denom * ddii;
    }
    (g == 1 ? v.v11 : v.v21) = t1;
    (g == 1 ? v.v12 : v.v22) = t2;
    (g == 1 ? v.v13 : v.v23) = t3;
  }
  return v;
}

void state_weights(const HdpState& state, const HdpParams& params, double& w0,
                   std::vector<double>& wh) {
  const double denom = params.c0 + static_cast<double>(state.ell_total());
  w0 = params.c0 / denom;
  wh.resize(state.num_dishes());
  for (std::size_t h = 0; h < wh.size(); ++h) wh[h] = static_cast<double>(state.ell_h(h)) / denom;
}

DiscreteMeasure draw_proxy(const HdpParams& params, std::size_t M, std::uint64_t seed) {
  Rng rng = make_rng(seed, 1);
  return mc_discretize(params.p0, M, rng);
}

// Accumulates per-sweep terms and assembles the posterior moments.
struct Assembler {
  Assembler(const HdpState& s, const HdpParams& p, const AnalyticsContext& c)
      : state(s), params(p), ctx(c) {}

  const HdpState& state;
  const HdpParams& params;
  const AnalyticsContext& ctx;
  double total_weight = 0.0;
  double var_xt[2] = {0.0, 0.0};
  double cov_xt = 0.0;
  double self = 0.0;
  double w0_bar = 0.0;
  std::vector<double> wh_bar;

  void add(const VTerms& v, double w0, std::span<const double> wh, double p) {
    const double c = params.c;
    const double n1 = static_cast<double>(state.n(1)), n2 = static_cast<double>(state.n(2));
    var_xt[0] += p * (v.v11 + v.v12 + v.v13 + c * c * v.v01 / ((c + n1) * (c + n1)));
    var_xt[1] += p * (v.v21 + v.v22 + v.v23 + c * c * v.v01 / ((c + n2) * (c + n2)));
    cov_xt += p * c * c * v.v01 / ((c + n1) * (c + n2));
    self += p * v.p0star_self;
    w0_bar += p * w0;
    wh_bar.resize(wh.size(), 0.0);
    for (std::size_t h = 0; h < wh.size(); ++h) wh_bar[h] += p * wh[h];
    total_weight += p;
  }

  CorrelationReport finish(bool v02_per_sweep) const {
    const double c = params.c;
    const double n1 = static_cast<double>(state.n(1)), n2 = static_cast<double>(state.n(2));
    const double z = total_weight;
    std::vector<double> wh(wh_bar.size());
    for (std::size_t h = 0; h < wh.size(); ++h) wh[h] = wh_bar[h] / z;
    const double v02 = v02_per_sweep ? self / z : ctx.inner(w0_bar / z, wh, w0_bar / z, wh);
    CorrelationReport rep;
    rep.var1 = var_xt[0] / z - c * c * v02 / ((c + n1) * (c + n1));
    rep.var2 = var_xt[1] / z - c * c * v02 / ((c + n2) * (c + n2));
    rep.cov = cov_xt / z - c * c * v02 / ((c + n1) * (c + n2));
    rep.method = Method::analytics;
    rep.kernel = ctx.kernel().to_string();
    return rep;
  }
};

}  // namespace

VTerms v_terms(const HdpState& state, const HdpParams& params, const AnalyticsContext& ctx) {
  if (ctx.num_dishes() != state.num_dishes()) throw InputError("v_terms: context/state mismatch");
  double w0;
  std::vector<double> wh;
  state_weights(state, params, w0, wh);
  return v_terms_for_weights(state, params, ctx, w0, wh, static_cast<double>(state.ell_total()));
}

VTerms v_terms(const HdpState& state, const HdpParams& params, const KernelSpec& k,
               const P0Star& p0star) {
  if (p0star.dish_atoms.size() != state.num_dishes() ||
      p0star.wh.size() != state.num_dishes()) {
    throw InputError("v_terms: P0* does not match the state");
  }
  const AnalyticsContext ctx(k, p0star.dish_atoms, p0star.p0_proxy);
  return v_terms_for_weights(state, params, ctx, p0star.w0, p0star.wh,
                             static_cast<double>(state.ell_total()));
}

ConditionalMoments cond_cov_var_given_tables(const HdpState& state, const HdpParams& params,
                                             const AnalyticsContext& ctx) {
  const auto v = v_terms(state, params, ctx);
  return {0.0, v.v11 + v.v12 + v.v13, v.v21 + v.v22 + v.v23};
}

CorrelationReport posterior_corr_analytics(const GroupedData& data, const HdpParams& params,
                                           const KernelSpec& k, const AnalyticsOptions& opts,
                                           std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  if (opts.R == 0 || opts.M == 0) throw InputError("analytics needs R >= 1 and M >= 1");
  HdpState state(data);
  const AnalyticsContext ctx(k, state.dishes(), draw_proxy(params, opts.M, seed), opts.cross);
  Rng rng = make_rng(seed, 2);
  for (std::size_t b = 0; b < opts.burn_in; ++b) gibbs_sweep(state, params, rng);

  std::ofstream diag;
  if (opts.diagnostics_csv) {
    diag.open(*opts.diagnostics_csv);
    if (!diag) throw InputError("cannot open diagnostics file " + *opts.diagnostics_csv);
    diag << "sweep,|l|,K,v11,v12,v13,v01\n";
  }
  Assembler acc(state, params, ctx);
  double w0;
  std::vector<double> wh;
  for (std::size_t r = 0; r < opts.R; ++r) {
    state_weights(state, params, w0, wh);
    const auto v =
        v_terms_for_weights(state, params, ctx, w0, wh, static_cast<double>(state.ell_total()));
    acc.add(v, w0, wh, 1.0);
    if (diag.is_open()) {
      diag << r << "," << state.ell_total() << "," << state.num_dishes() << "," << v.v11 << ","
           << v.v12 << "," << v.v13 << "," << v.v01 << "\n";
    }
    gibbs_sweep(state, params, rng);
  }
  auto rep = acc.finish(opts.v02_per_sweep);
  rep.m = opts.M;
  rep.r = opts.R;
  rep.seed = seed;
  rep.cross_path = to_string(cross_sum_path(k, opts.M, opts.M, opts.cross));
  rep.finalize();
  rep.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

CorrelationReport posterior_corr_enumerated(const GroupedData& data, const HdpParams& params,
                                            const KernelSpec& k, std::size_t M,
                                            std::uint64_t seed, bool v02_per_sweep) {
  params.validate();
  const HdpState state(data);
  const AnalyticsContext ctx(k, state.dishes(), draw_proxy(params, M, seed));
  const auto post = enumerate_table_posterior(state, params);
  const std::size_t K = state.num_dishes();
  Assembler acc(state, params, ctx);
  std::vector<double> wh(K);
  for (const auto& [cfg, p] : post) {
    double total = 0.0;
    for (std::size_t h = 0; h < K; ++h) total += cfg[h] + cfg[K + h];
    const double denom = params.c0 + total;
    for (std::size_t h = 0; h < K; ++h) wh[h] = (cfg[h] + cfg[K + h]) / denom;
    const double w0 = params.c0 / denom;
    acc.add(v_terms_for_weights(state, params, ctx, w0, wh, total), w0, wh, p);
  }
  auto rep = acc.finish(v02_per_sweep);
  rep.m = M;
  rep.seed = seed;
  rep.finalize();
  return rep;
}

BlockSet posterior_blocks(const GroupedData& data, const HdpParams& params, std::size_t M,
                          std::size_t burn_in, Rng& rng) {
  params.validate();
  HdpState state(data);
  for (std::size_t b = 0; b < burn_in; ++b) gibbs_sweep(state, params, rng);
  BlockSet blocks;
  blocks.reserve(M);
  for (std::size_t t = 0; t < M; ++t) blocks.push(sample_posterior_block(state, params, rng));
  return blocks;
}

CorrelationReport posterior_corr_sampling(const GroupedData& data, const HdpParams& params,
                                          const KernelSpec& k, const SamplingOptions& opts,
                                          std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  if (opts.M < 2) throw InputError("sampling estimator needs M >= 2 blocks");
  Rng rng = make_rng(seed, 3);
  const auto blocks = posterior_blocks(data, params, opts.M, opts.burn_in, rng);
  auto rep = corr_hat(k, blocks, opts.estimator);
  rep.seed = seed;
  rep.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace kcorr
