#include "kcorr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "kcorr/errors.hpp"
#include "text.hpp"

namespace kcorr {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  const std::size_t count = std::min(workers, n);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

BlockSet prior_blocks(const HdpParams& params, std::size_t M, Rng& rng) {
  params.validate();
  const HdpState empty;
  BlockSet blocks;
  blocks.reserve(M);
  for (std::size_t t = 0; t < M; ++t) blocks.push(sample_predictive_block(empty, params, rng));
  return blocks;
}

CorrelationReport prior_corr_sampling(const HdpParams& params, const KernelSpec& k, std::size_t M,
                                      std::uint64_t seed, const EstimatorOptions& opts) {
  Rng rng = make_rng(seed, 0);
  auto rep = corr_hat(k, prior_blocks(params, M, rng), opts);
  rep.seed = seed;
  return rep;
}

GroupedData prefix(const GroupedData& data, std::size_t n1, std::size_t n2) {
  if (n1 > data.n(1) || n2 > data.n(2)) throw InputError("not enough observations for the grid");
  GroupedData out;
  out.x[0].assign(data.x[0].begin(), data.x[0].begin() + static_cast<std::ptrdiff_t>(n1));
  out.x[1].assign(data.x[1].begin(), data.x[1].begin() + static_cast<std::ptrdiff_t>(n2));
  return out;
}

namespace {

// Constant observations: zero spread under every kernel.
bool constant_sample(const std::vector<double>& x) {
  return !x.empty() && std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

std::size_t max_of(const std::vector<std::size_t>& v) {
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

std::vector<KernelSpec> convergence_kernels() {
  return {KernelSpec::gaussian(1.0), KernelSpec::laplace(1.0), KernelSpec::linear(0.0, 1.0),
          KernelSpec::setwise_interval(0.0, 0.95)};
}

std::string ConvergenceResult::to_csv() const {
  std::ostringstream os;
  os << "n1,n2,kernel,corr,flagged\n";
  for (const auto& c : cells) {
    os << c.n1 << "," << c.n2 << ",\"" << c.kernel << "\"," << detail::format_double(c.corr) << ","
       << (c.flagged ? 1 : 0) << "\n";
  }
  return os.str();
}

ConvergenceResult run_convergence(const ConvergenceConfig& cfg) {
  cfg.params.validate();
  GroupedData data;
  if (cfg.data) {
    data = *cfg.data;
  } else {
    Rng rng = make_rng(cfg.seed, 0);
    data = sample_hdp_data(cfg.params, max_of(cfg.n1_grid), max_of(cfg.n2_grid), rng);
  }
  struct Task {
    std::size_t kernel, n1, n2;
  };
  std::vector<Task> tasks;
  for (std::size_t k = 0; k < cfg.kernels.size(); ++k) {
    for (auto n1 : cfg.n1_grid) {
      for (auto n2 : cfg.n2_grid) tasks.push_back({k, n1, n2});
    }
  }
  ConvergenceResult out;
  out.cells.resize(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    const auto& t = tasks[i];
    const auto& k = cfg.kernels[t.kernel];
    const auto d = prefix(data, t.n1, t.n2);
    auto& cell = out.cells[i];
    cell.n1 = t.n1;
    cell.n2 = t.n2;
    cell.kernel = k.to_string();
    cell.flagged = constant_sample(d.x[0]) || constant_sample(d.x[1]);
    try {
      // One seed for every cell: common random numbers across the grid.
      cell.corr = posterior_corr_analytics(d, cfg.params, k, cfg.analytics, cfg.seed).corr;
    } catch (const DegenerateVarianceError&) {
      cell.flagged = true;
      cell.corr = std::nan("");
    }
  });
  for (const auto& k : cfg.kernels) {
    std::vector<double> lx, ly;
    for (const auto& c : out.cells) {
      if (c.kernel != k.to_string() || c.flagged || !(c.corr > 0.0)) continue;
      lx.push_back(std::log(static_cast<double>(c.n1) * static_cast<double>(c.n2)));
      ly.push_back(std::log(c.corr));
    }
    if (lx.size() >= 2) out.slopes[k.to_string()] = ols_fit(lx, ly).second;
  }
  return out;
}

ReplicatedConvergence run_convergence_replicated(const ConvergenceConfig& cfg,
                                                std::size_t datasets) {
  if (datasets == 0) throw InputError("need at least one dataset");
  if (cfg.data && datasets > 1) throw InputError("replication needs generated data");
  ReplicatedConvergence out;
  for (std::size_t i = 0; i < datasets; ++i) {
    auto c = cfg;
    c.seed = cfg.seed + i;
    out.runs.push_back(run_convergence(c));
    for (const auto& [k, s] : out.runs.back().slopes) out.slopes[k].push_back(s);
  }
  for (const auto& [k, v] : out.slopes) out.median_slopes[k] = quartiles(v).median;
  return out;
}

double StabilityResult::corr(const std::string& kernel, std::size_t n) const {
  for (const auto& c : cells) {
    if (c.kernel == kernel && c.n == n) return c.corr;
  }
  throw InputError("no stability cell for " + kernel);
}

std::string StabilityResult::to_csv() const {
  std::ostringstream os;
  os << "kernel,n,corr,flagged\n";
  for (const auto& c : cells) {
    os << "\"" << c.kernel << "\"," << c.n << "," << detail::format_double(c.corr) << ","
       << (c.flagged ? 1 : 0) << "\n";
  }
  return os.str();
}

StabilityResult run_stability(const StabilityConfig& cfg) {
  cfg.params.validate();
  std::vector<KernelSpec> kernels;
  for (double s : cfg.scales) kernels.push_back(KernelSpec::gaussian(s));
  for (double s : cfg.scales) kernels.push_back(KernelSpec::laplace(s));
  for (double b : cfg.set_bounds) kernels.push_back(KernelSpec::setwise_interval(0.0, b));
  GroupedData data;
  if (cfg.data) {
    data = *cfg.data;
  } else {
    Rng rng = make_rng(cfg.seed, 0);
    const auto n = max_of(cfg.sizes);
    data = sample_hdp_data(cfg.params, n, n, rng);
  }
  StabilityResult out;
  out.cells.resize(kernels.size() * cfg.sizes.size());
  parallel_for(out.cells.size(), cfg.workers, [&](std::size_t i) {
    const auto& k = kernels[i / cfg.sizes.size()];
    const std::size_t n = cfg.sizes[i % cfg.sizes.size()];
    auto& cell = out.cells[i];
    cell.kernel = k.to_string();
    cell.n = n;
    if (n == 0) {
      cell.corr = prior_corr_closed(cfg.params);
      return;
    }
    const auto d = prefix(data, n, n);
    cell.flagged = constant_sample(d.x[0]) || constant_sample(d.x[1]);
    try {
      cell.corr = posterior_corr_analytics(d, cfg.params, k, cfg.analytics, cfg.seed).corr;
    } catch (const DegenerateVarianceError&) {
      cell.flagged = true;
      cell.corr = std::nan("");
    }
  });
  return out;
}

GroupedData sample_two_hdp_data(std::size_t n1, std::size_t n2, Rng& rng) {
  const HdpParams left{10.0, 10.0, Dist::normal(-1.0, 2.0)};
  const HdpParams right{10.0, 10.0, Dist::normal(1.0, 2.0)};
  GroupedData out;
  out.x[0] = sample_hdp_data(left, n1, 0, rng).x[0];
  out.x[1] = sample_hdp_data(right, 0, n2, rng).x[1];
  return out;
}

std::vector<double> hdp_predictive_sample(const GroupedData& data, const HdpParams& params,
                                          int group, std::size_t count, std::size_t burn_in,
                                          Rng& rng) {
  params.validate();
  HdpState state(data);
  for (std::size_t b = 0; b < burn_in; ++b) gibbs_sweep(state, params, rng);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    gibbs_sweep(state, params, rng);
    out.push_back(predictive_step(state, params, group, rng).x);
  }
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<std::vector<double>> abs_diff_matrix(const std::vector<std::vector<double>>& a,
                                                 const std::vector<std::vector<double>>& b) {
  std::vector<std::vector<double>> m(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) m[i][j] = std::abs(mean_of(a[i]) - mean_of(b[j]));
  }
  return m;
}

}  // namespace

std::string CompareResult::to_csv() const {
  std::ostringstream os;
  os << "matrix,xi_row,xi_col,abs_mean_diff\n";
  const std::pair<const char*, const std::vector<std::vector<double>>*> mats[] = {
      {"gauss_gauss", &gg}, {"hdp_hdp", &hh}, {"gauss_hdp", &gh}};
  for (const auto& [name, m] : mats) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      for (std::size_t j = 0; j < xi.size(); ++j) {
        os << name << "," << detail::format_double(xi[i]) << "," << detail::format_double(xi[j])
           << "," << detail::format_double((*m)[i][j]) << "\n";
      }
    }
  }
  return os.str();
}

std::string CompareResult::samples_csv() const {
  std::ostringstream os;
  os << "model,xi,run,value\n";
  for (int r = 0; r < 2; ++r) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      for (double v : gauss_runs[r][i]) {
        os << "gauss," << detail::format_double(xi[i]) << "," << r << ","
           << detail::format_double(v) << "\n";
      }
      for (double v : hdp_runs[r][i]) {
        os << "hdp," << detail::format_double(xi[i]) << "," << r << ","
           << detail::format_double(v) << "\n";
      }
    }
  }
  return os.str();
}

CompareResult run_compare(const CompareConfig& cfg) {
  CompareResult out;
  out.xi = cfg.xi;
  if (cfg.data) {
    out.data = *cfg.data;
  } else {
    Rng rng = make_rng(cfg.seed, 0);
    out.data = sample_two_hdp_data(cfg.n1, cfg.n2, rng);
  }
  const std::size_t X = cfg.xi.size();
  for (double xi : cfg.xi) {
    const CalibrationTarget target{cfg.v, xi, cfg.t2, cfg.sigma};
    out.gauss_cal.push_back(calibrate_gaussian(target));
    out.hdp_cal.push_back(calibrate_hdp(target));
  }
  for (int r = 0; r < 2; ++r) {
    out.gauss_runs[r].resize(X);
    out.hdp_runs[r].resize(X);
  }
  parallel_for(4 * X, cfg.workers, [&](std::size_t task) {
    const std::size_t i = task % X;
    const int run = static_cast<int>((task / X) % 2);
    const bool hdp = task / (2 * X) == 1;
    Rng rng = make_rng(cfg.seed, 100 + task);
    if (hdp) {
      const HdpParams hp{out.hdp_cal[i].c, out.hdp_cal[i].c0, Dist::normal(0.0, cfg.t2)};
      out.hdp_runs[run][i] = hdp_predictive_sample(out.data, hp, 2, cfg.samples, cfg.burn_in, rng);
    } else {
      out.gauss_runs[run][i] =
          gauss_predictive_sample(out.data, out.gauss_cal[i].params, 2, cfg.samples, rng);
    }
  });
  out.gg = abs_diff_matrix(out.gauss_runs[0], out.gauss_runs[1]);
  out.hh = abs_diff_matrix(out.hdp_runs[0], out.hdp_runs[1]);
  out.gh = abs_diff_matrix(out.gauss_runs[0], out.hdp_runs[0]);
  return out;
}

Quartiles quartiles(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) throw InputError("quartiles of an empty sample");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {q(0.25), q(0.5), q(0.75)};
}

std::string EstimatorComparisonResult::to_csv() const {
  std::ostringstream os;
  os << "method,q1,median,q3,iqr,degenerate\n";
  auto row = [&](const char* name, const Quartiles& q) {
    os << name << "," << detail::format_double(q.q1) << "," << detail::format_double(q.median)
       << "," << detail::format_double(q.q3) << "," << detail::format_double(q.iqr()) << ","
       << (degenerate ? 1 : 0) << "\n";
  };
  row("analytics", analytics_q);
  row("sampling", sampling_q);
  return os.str();
}

EstimatorComparisonResult run_estimator_comparison(const EstimatorComparisonConfig& cfg) {
  GroupedData data;
  if (cfg.data) {
    data = *cfg.data;
  } else {
    Rng rng = make_rng(cfg.seed, 0);
    data = sample_hdp_data(cfg.params, cfg.n1, cfg.n2, rng);
  }
  EstimatorComparisonResult out;
  std::vector<double> pooled = data.x[0];
  pooled.insert(pooled.end(), data.x[1].begin(), data.x[1].end());
  out.degenerate = constant_sample(pooled);
  out.analytics.assign(cfg.repetitions, std::nan(""));
  out.sampling.assign(cfg.repetitions, std::nan(""));
  AnalyticsOptions aopt;
  aopt.R = cfg.R;
  aopt.M = cfg.proxy_M;
  aopt.burn_in = cfg.burn_in;
  SamplingOptions sopt;
  sopt.M = cfg.sampling_M;
  sopt.burn_in = cfg.burn_in;
  parallel_for(2 * cfg.repetitions, cfg.workers, [&](std::size_t task) {
    const std::size_t r = task % cfg.repetitions;
    try {
      if (task < cfg.repetitions) {
        out.analytics[r] =
            posterior_corr_analytics(data, cfg.params, cfg.kernel, aopt, derive_seed(cfg.seed, 1000 + r)).corr;
      } else {
        out.sampling[r] =
            posterior_corr_sampling(data, cfg.params, cfg.kernel, sopt, derive_seed(cfg.seed, 2000 + r)).corr;
      }
    } catch (const DegenerateVarianceError&) {
    }
  });
  const auto valid = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return !std::isnan(x); });
  };
  if (!valid(out.analytics) || !valid(out.sampling)) {
    out.degenerate = true;
    return out;
  }
  out.analytics_q = quartiles(out.analytics);
  out.sampling_q = quartiles(out.sampling);
  return out;
}

GroupedData gen_data(const GenConfig& cfg) {
  Rng rng = make_rng(cfg.seed, 0);
  switch (cfg.model) {
    case GenModel::hdp:
      return sample_hdp_data(cfg.hdp, cfg.n1, cfg.n2, rng);
    case GenModel::twohdp:
      return sample_two_hdp_data(cfg.n1, cfg.n2, rng);
    case GenModel::gauss:
      return sample_gauss_data(cfg.gauss, cfg.n1, cfg.n2, rng);
  }
  return {};
}

}  // namespace kcorr
