#include "kcorr/hdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>

#include "json.hpp"
#include "kcorr/errors.hpp"

namespace kcorr {

namespace {

std::size_t pick_weighted(const std::vector<double>& w, double total, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  // u landed on the rounding gap at the top; return the last positive weight.
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return w.size() - 1;
}

void check_group(int group) {
  if (group != 1 && group != 2) throw InputError("group must be 1 or 2");
}

double log_rising(double a, std::size_t n) {
  return std::lgamma(a + static_cast<double>(n)) - std::lgamma(a);
}

}  // namespace

void HdpParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("hDP concentration c must be positive");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw InputError("hDP concentration c0 must be positive");
}

HdpState::HdpState(const GroupedData& data) {
  for (int g = 1; g <= 2; ++g) {
    for (double v : data.x[g - 1]) append(g, v, next_label_);
  }
}

HdpState::HdpState(const GroupedData& data,
                   const std::array<std::vector<std::int64_t>, 2>& tables) {
  for (int g = 0; g < 2; ++g) {
    if (tables[g].size() != data.x[g].size()) {
      throw InputError("state: table labels do not align with observations");
    }
  }
  for (int g = 1; g <= 2; ++g) {
    for (std::size_t j = 0; j < data.x[g - 1].size(); ++j) {
      const double v = data.x[g - 1][j];
      if (!std::isfinite(v)) throw InputError("state: observations must be finite");
      const std::int64_t label = tables[g - 1][j];
      if (label < 0) throw InputError("state: table labels must be nonnegative");
      x_[g - 1].push_back(v);
      const std::size_t h = add_dish(v);
      dish_of_[g - 1].push_back(h);
      ++n_ih_[g - 1][h];
      t_[g - 1].push_back(label);
      seat(g, x_[g - 1].size() - 1, label);
      next_label_ = std::max(next_label_, label + 1);
    }
  }
  try {
    check_invariants();
  } catch (const InternalConsistencyError& e) {
    throw InputError(std::string("state: ") + e.what());
  }
}

std::size_t HdpState::add_dish(double x) {
  auto [it, inserted] = dish_index_.emplace(x, dishes_.size());
  if (inserted) {
    dishes_.push_back(x);
    for (int g = 0; g < 2; ++g) {
      n_ih_[g].push_back(0);
      tables_[g].emplace_back();
    }
  }
  return it->second;
}

void HdpState::seat(int group, std::size_t j, std::int64_t label) {
  auto& list = tables_[group - 1][dish_of_[group - 1][j]];
  t_[group - 1][j] = label;
  for (auto& tb : list) {
    if (tb.label == label) {
      ++tb.count;
      return;
    }
  }
  list.push_back({label, 1});
  ++ell_total_;
}

void HdpState::unseat(int group, std::size_t j) {
  auto& list = tables_[group - 1][dish_of_[group - 1][j]];
  const std::int64_t label = t_[group - 1][j];
  for (auto it = list.begin(); it != list.end(); ++it) {
    if (it->label == label) {
      if (--it->count == 0) {
        list.erase(it);
        --ell_total_;
      }
      return;
    }
  }
  throw InternalConsistencyError("state: customer seated at an unknown table");
}

void HdpState::append(int group, double x, std::int64_t table) {
  check_group(group);
  if (!std::isfinite(x)) throw InputError("state: observations must be finite");
  if (table < 0) throw InputError("state: table labels must be nonnegative");
  const std::size_t h = add_dish(x);
  if (table < next_label_) {
    const auto& list = tables_[group - 1][h];
    const bool known = std::any_of(list.begin(), list.end(),
                                   [&](const Table& tb) { return tb.label == table; });
    if (!known) throw InputError("state: existing table label does not serve this dish here");
  }
  x_[group - 1].push_back(x);
  dish_of_[group - 1].push_back(h);
  ++n_ih_[group - 1][h];
  t_[group - 1].push_back(table);
  seat(group, x_[group - 1].size() - 1, table);
  next_label_ = std::max(next_label_, table + 1);
}

std::vector<int> HdpState::table_config() const {
  std::vector<int> out;
  out.reserve(2 * dishes_.size());
  for (int g = 1; g <= 2; ++g) {
    for (std::size_t h = 0; h < dishes_.size(); ++h) out.push_back(static_cast<int>(ell_ih(g, h)));
  }
  return out;
}

void HdpState::check_invariants() const {
  auto fail = [](const std::string& m) { throw InternalConsistencyError(m); };
  std::map<std::int64_t, std::pair<int, std::size_t>> owner;
  std::size_t total_tables = 0;
  for (int g = 0; g < 2; ++g) {
    if (t_[g].size() != x_[g].size() || dish_of_[g].size() != x_[g].size()) {
      fail("labels/observations misaligned");
    }
    std::vector<std::size_t> n_check(dishes_.size(), 0);
    std::map<std::int64_t, std::size_t> counts;
    for (std::size_t j = 0; j < x_[g].size(); ++j) {
      const auto it = dish_index_.find(x_[g][j]);
      if (it == dish_index_.end() || it->second != dish_of_[g][j]) fail("dish index out of date");
      ++n_check[dish_of_[g][j]];
      const std::int64_t label = t_[g][j];
      auto [o, inserted] = owner.emplace(label, std::make_pair(g, dish_of_[g][j]));
      if (!inserted && o->second.first != g) fail("table shared across groups");
      if (!inserted && o->second.second != dish_of_[g][j]) fail("table serves two dishes");
      ++counts[label];
      if (label >= next_label_) fail("label counter behind existing labels");
    }
    for (std::size_t h = 0; h < dishes_.size(); ++h) {
      if (n_check[h] != n_ih_[g][h]) fail("per-dish counts out of date");
      for (const auto& tb : tables_[g][h]) {
        const auto c = counts.find(tb.label);
        if (c == counts.end() || c->second != tb.count || tb.count == 0) {
          fail("table occupancy out of date");
        }
        ++total_tables;
      }
    }
    std::size_t listed = 0;
    for (std::size_t h = 0; h < dishes_.size(); ++h) listed += tables_[g][h].size();
    if (listed != counts.size()) fail("table list out of date");
  }
  if (total_tables != ell_total_) fail("|l| out of date");
  const std::size_t n = x_[0].size() + x_[1].size();
  if (dishes_.size() > ell_total_ || ell_total_ > n) fail("K <= |l| <= n violated");
}

std::string HdpState::to_json() const {
  nlohmann::ordered_json j;
  j["x1"] = x_[0];
  j["x2"] = x_[1];
  j["t1"] = t_[0];
  j["t2"] = t_[1];
  return j.dump();
}

HdpState HdpState::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    GroupedData d;
    d.x[0] = j.at("x1").get<std::vector<double>>();
    d.x[1] = j.at("x2").get<std::vector<double>>();
    std::array<std::vector<std::int64_t>, 2> t{j.at("t1").get<std::vector<std::int64_t>>(),
                                               j.at("t2").get<std::vector<std::int64_t>>()};
    return HdpState(d, t);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("state json: ") + e.what());
  }
}

double prior_corr_closed(const HdpParams& params) {
  params.validate();
  return (1.0 + params.c) / (1.0 + params.c + params.c0);
}

double prior_variance_factor(const HdpParams& params) {
  params.validate();
  return (1.0 + params.c + params.c0) / ((1.0 + params.c) * (1.0 + params.c0));
}

SetwiseMoments prior_setwise_moments(const HdpParams& params, double p0A) {
  params.validate();
  if (!(p0A >= 0.0 && p0A <= 1.0)) throw InputError("P0(A) must lie in [0,1]");
  if (p0A == 0.0 || p0A == 1.0) {
    throw DegenerateVarianceError("P0(A) in {0,1}: P(A) is deterministic");
  }
  const double b = p0A * (1.0 - p0A);
  return {prior_variance_factor(params) * b, b / (1.0 + params.c0)};
}

PredictiveDraw predictive_step(const HdpState& state, const HdpParams& params, int group,
                               Rng& rng) {
  check_group(group);
  const std::size_t n = state.n(group);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (n > 0 && unif(rng) * (params.c + static_cast<double>(n)) < static_cast<double>(n)) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    return {state.x(group, j), state.table(group, j)};
  }
  const double ell = static_cast<double>(state.ell_total());
  if (state.ell_total() > 0 && unif(rng) * (params.c0 + ell) < ell) {
    std::vector<double> w(state.num_dishes());
    for (std::size_t h = 0; h < w.size(); ++h) w[h] = static_cast<double>(state.ell_h(h));
    return {state.dish(pick_weighted(w, ell, rng)), state.next_label()};
  }
  return {params.p0.sample(rng), state.next_label()};
}

void gibbs_sweep(HdpState& state, const HdpParams& params, Rng& rng) {
  std::vector<double> w;
  for (int g = 1; g <= 2; ++g) {
    for (std::size_t j = 0; j < state.n(g); ++j) {
      const std::size_t h = state.dish_of(g, j);
      state.unseat(g, j);
      const auto& list = state.tables_[g - 1][h];
      w.resize(list.size() + 1);
      double total = 0.0;
      for (std::size_t a = 0; a < list.size(); ++a) {
        w[a] = static_cast<double>(list[a].count);
        total += w[a];
      }
      w.back() = params.c * static_cast<double>(state.ell_h(h)) /
                 (params.c0 + static_cast<double>(state.ell_total()));
      total += w.back();
      std::int64_t label;
      const std::size_t pick = total > 0.0 ? pick_weighted(w, total, rng) : list.size();
      if (pick < list.size()) {
        label = list[pick].label;
      } else {
        label = state.next_label_++;
      }
      state.seat(g, j, label);
    }
  }
}

std::uint64_t stirling_unsigned(unsigned n, unsigned l) {
  if (n > 20) throw InputError("stirling_unsigned: exact values only for n <= 20");
  if (l > n) return 0;
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 21>, 21> s{};
    s[0][0] = 1;
    for (unsigned m = 0; m < 20; ++m) {
      for (unsigned k = 1; k <= m + 1; ++k) s[m + 1][k] = m * s[m][k] + s[m][k - 1];
    }
    return s;
  }();
  return table[n][l];
}

double log_stirling_unsigned(unsigned n, unsigned l) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (l > n) return kNegInf;
  if (n <= 20) {
    const auto v = stirling_unsigned(n, l);
    return v == 0 ? kNegInf : std::log(static_cast<double>(v));
  }
  static std::mutex mu;
  static std::vector<std::vector<double>> rows{{0.0}};
  std::lock_guard<std::mutex> lock(mu);
  while (rows.size() <= n) {
    const std::size_t m = rows.size() - 1;
    const auto& prev = rows.back();
    std::vector<double> next(m + 2, kNegInf);
    for (std::size_t k = 1; k <= m + 1; ++k) {
      const double a = (k <= m && m > 0) ? std::log(static_cast<double>(m)) + prev[k] : kNegInf;
      const double b = prev[k - 1];
      const double hi = std::max(a, b);
      next[k] = hi == kNegInf ? kNegInf : hi + std::log1p(std::exp(std::min(a, b) - hi));
    }
    rows.push_back(std::move(next));
  }
  return rows[n][l];
}

std::map<std::vector<int>, double> enumerate_table_posterior(const HdpState& state,
                                                             const HdpParams& params,
                                                             double max_configs) {
  params.validate();
  const std::size_t K = state.num_dishes();
  double size = 1.0;
  for (int g = 1; g <= 2; ++g) {
    for (std::size_t h = 0; h < K; ++h) size *= std::max<double>(1.0, state.n_ih(g, h));
  }
  if (size > max_configs) {
    throw CapacityError("table enumeration needs " + std::to_string(size) +
                        " configurations; limit is " + std::to_string(max_configs));
  }
  std::vector<int> lo(2 * K), hi(2 * K);
  for (int g = 1; g <= 2; ++g) {
    for (std::size_t h = 0; h < K; ++h) {
      const int n = static_cast<int>(state.n_ih(g, h));
      lo[(g - 1) * K + h] = n > 0 ? 1 : 0;
      hi[(g - 1) * K + h] = n;
    }
  }
  std::vector<std::pair<std::vector<int>, double>> logs;
  std::vector<int> cur = lo;
  const double log_c = std::log(params.c);
  while (true) {
    std::size_t total = 0;
    double lw = 0.0;
    for (std::size_t h = 0; h < K; ++h) {
      const int l1 = cur[h], l2 = cur[K + h];
      total += static_cast<std::size_t>(l1 + l2);
      lw += std::lgamma(static_cast<double>(l1 + l2));
      lw += log_stirling_unsigned(static_cast<unsigned>(state.n_ih(1, h)), static_cast<unsigned>(l1));
      lw += log_stirling_unsigned(static_cast<unsigned>(state.n_ih(2, h)), static_cast<unsigned>(l2));
    }
    lw += static_cast<double>(total) * log_c - log_rising(params.c0, total);
    logs.emplace_back(cur, lw);
    std::size_t pos = 0;
    while (pos < cur.size() && cur[pos] == hi[pos]) {
      cur[pos] = lo[pos];
      ++pos;
    }
    if (pos == cur.size()) break;
    ++cur[pos];
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& [cfg, lw] : logs) mx = std::max(mx, lw);
  double z = 0.0;
  for (const auto& [cfg, lw] : logs) z += std::exp(lw - mx);
  std::map<std::vector<int>, double> out;
  for (const auto& [cfg, lw] : logs) out[cfg] = std::exp(lw - mx) / z;
  return out;
}

namespace {

PairedBlock draw_block(HdpState& scratch, const HdpParams& params, Rng& rng) {
  double v[4];
  for (int i = 0; i < 4; ++i) {
    const int g = i % 2 + 1;
    const auto d = predictive_step(scratch, params, g, rng);
    scratch.append(g, d.x, d.table);
    v[i] = d.x;
  }
  return {{v[0]}, {v[1]}, {v[2]}, {v[3]}};
}

}  // namespace

PairedBlock sample_posterior_block(HdpState& state, const HdpParams& params, Rng& rng) {
  HdpState scratch = state;
  auto b = draw_block(scratch, params, rng);
  gibbs_sweep(state, params, rng);
  return b;
}

PairedBlock sample_predictive_block(const HdpState& state, const HdpParams& params, Rng& rng) {
  HdpState scratch = state;
  return draw_block(scratch, params, rng);
}

GroupedData sample_hdp_data(const HdpParams& params, std::size_t n1, std::size_t n2, Rng& rng) {
  params.validate();
  HdpState state;
  for (int g = 1; g <= 2; ++g) {
    for (std::size_t j = 0; j < (g == 1 ? n1 : n2); ++j) {
      const auto d = predictive_step(state, params, g, rng);
      state.append(g, d.x, d.table);
    }
  }
  return state.data();
}

namespace {

std::vector<double> stick_weights(double c, std::size_t L, Rng& rng) {
  std::gamma_distribution<double> g1(1.0, 1.0), gc(c, 1.0);
  std::vector<double> w(L);
  double rest = 1.0;
  for (std::size_t k = 0; k + 1 < L; ++k) {
    const double a = g1(rng), b = gc(rng);
    const double v = a / (a + b);
    w[k] = rest * v;
    rest *= 1.0 - v;
  }
  w[L - 1] = rest;
  return w;
}

DiscreteMeasure normalized(Points atoms, std::vector<double> w) {
  double s = 0.0;
  for (double v : w) s += v;
  for (double& v : w) v /= s;
  double mass = 0.0;
  for (double v : w) mass += v;
  return DiscreteMeasure(std::move(atoms), std::move(w), mass);
}

}  // namespace

DiscreteMeasure sample_dp_measure(double c, const Dist& base, std::size_t truncation, Rng& rng) {
  if (truncation == 0) throw InputError("truncation must be positive");
  if (!(c > 0.0)) throw InputError("DP concentration must be positive");
  auto w = stick_weights(c, truncation, rng);
  std::vector<double> atoms(truncation);
  for (auto& a : atoms) a = base.sample(rng);
  return normalized(Points::scalars(std::move(atoms)), std::move(w));
}

MeasurePair sample_hdp_measures(const HdpParams& params, std::size_t truncation, Rng& rng) {
  params.validate();
  const auto p0 = sample_dp_measure(params.c0, params.p0, truncation, rng);
  std::array<std::vector<double>, 2> w;
  for (auto& wi : w) {
    wi.resize(truncation);
    double s = 0.0;
    for (std::size_t k = 0; k < truncation; ++k) {
      const double shape = params.c * p0.weights()[k];
      wi[k] = shape > 0.0 ? std::gamma_distribution<double>(shape, 1.0)(rng) : 0.0;
      s += wi[k];
    }
    if (!(s > 0.0)) {
      // Every gamma variate underflowed; fall back to the largest root weight.
      const auto it = std::max_element(p0.weights().begin(), p0.weights().end());
      wi[static_cast<std::size_t>(it - p0.weights().begin())] = 1.0;
    }
  }
  return {normalized(p0.atoms(), std::move(w[0])), normalized(p0.atoms(), std::move(w[1]))};
}

}  // namespace kcorr
