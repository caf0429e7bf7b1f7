#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kcorr/measures.hpp"
#include "kcorr/moments.hpp"
#include "kcorr/points.hpp"
#include "kcorr/random.hpp"

namespace kcorr {

struct HdpParams {
  double c = 1.0;
  double c0 = 1.0;
  Dist p0 = Dist::uniform(0.0, 1.0);

  void validate() const;
};

// Two groups of scalar observations.
struct GroupedData {
  std::array<std::vector<double>, 2> x;

  [[nodiscard]] std::size_t n(int group) const { return x.at(group - 1).size(); }
};

// Observations, table labels and the derived franchise counts.
class HdpState {
 public:
  HdpState() = default;
  // Every observation gets its own table.
  explicit HdpState(const GroupedData& data);
  // Explicit labels; validated.
  HdpState(const GroupedData& data, const std::array<std::vector<std::int64_t>, 2>& tables);

  [[nodiscard]] std::size_t n(int group) const { return x_[group - 1].size(); }
  [[nodiscard]] std::size_t num_dishes() const { return dishes_.size(); }
  [[nodiscard]] double dish(std::size_t h) const { return dishes_[h]; }
  [[nodiscard]] const std::vector<double>& dishes() const { return dishes_; }
  [[nodiscard]] std::size_t n_ih(int group, std::size_t h) const { return n_ih_[group - 1][h]; }
  [[nodiscard]] std::size_t ell_ih(int group, std::size_t h) const {
    return tables_[group - 1][h].size();
  }
  [[nodiscard]] std::size_t ell_h(std::size_t h) const { return ell_ih(1, h) + ell_ih(2, h); }
  [[nodiscard]] std::size_t ell_total() const { return ell_total_; }

  [[nodiscard]] double x(int group, std::size_t j) const { return x_[group - 1][j]; }
  [[nodiscard]] std::int64_t table(int group, std::size_t j) const { return t_[group - 1][j]; }
  [[nodiscard]] std::size_t dish_of(int group, std::size_t j) const {
    return dish_of_[group - 1][j];
  }
  [[nodiscard]] const std::vector<double>& values(int group) const { return x_[group - 1]; }
  [[nodiscard]] const std::vector<std::int64_t>& tables(int group) const { return t_[group - 1]; }
  [[nodiscard]] GroupedData data() const { return GroupedData{x_}; }

  // Table counts (l_{1,1..K}, l_{2,1..K}) in dish order.
  [[nodiscard]] std::vector<int> table_config() const;

  [[nodiscard]] std::int64_t next_label() const { return next_label_; }

  // Appends an observation at a table (existing label or next_label()).
  void append(int group, double x, std::int64_t table);

  // Throws InternalConsistencyError if any franchise invariant is broken.
  void check_invariants() const;

  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] static HdpState from_json(const std::string& text);

 private:
  friend void gibbs_sweep(HdpState&, const HdpParams&, Rng&);

  struct Table {
    std::int64_t label;
    std::size_t count;
  };

  std::size_t add_dish(double x);
  void seat(int group, std::size_t j, std::int64_t label);
  void unseat(int group, std::size_t j);

  std::array<std::vector<double>, 2> x_;
  std::array<std::vector<std::int64_t>, 2> t_;
  std::array<std::vector<std::size_t>, 2> dish_of_;
  std::vector<double> dishes_;
  std::map<double, std::size_t> dish_index_;
  std::array<std::vector<std::size_t>, 2> n_ih_;
  std::array<std::vector<std::vector<Table>>, 2> tables_;
  std::size_t ell_total_ = 0;
  std::int64_t next_label_ = 0;
};

[[nodiscard]] double prior_corr_closed(const HdpParams& params);

struct SetwiseMoments {
  double var = 0.0;
  double cov = 0.0;
};

[[nodiscard]] SetwiseMoments prior_setwise_moments(const HdpParams& params, double p0A);

// (1+c+c0) / ((1+c)(1+c0)).
[[nodiscard]] double prior_variance_factor(const HdpParams& params);

struct PredictiveDraw {
  double x = 0.0;
  std::int64_t table = 0;
};

// One draw from the joint predictive of (X, T) for the given group; the state is unchanged.
[[nodiscard]] PredictiveDraw predictive_step(const HdpState& state, const HdpParams& params,
                                             int group, Rng& rng);

// One scan over group 1 then group 2, resampling every table label.
void gibbs_sweep(HdpState& state, const HdpParams& params, Rng& rng);

// Exact posterior over table-count configurations, keyed as table_config().
[[nodiscard]] std::map<std::vector<int>, double> enumerate_table_posterior(
    const HdpState& state, const HdpParams& params, double max_configs = 1e6);

// Unsigned Stirling numbers of the first kind.
[[nodiscard]] std::uint64_t stirling_unsigned(unsigned n, unsigned l);  // n <= 20
[[nodiscard]] double log_stirling_unsigned(unsigned n, unsigned l);    // -inf when zero

// Draws X_{i,n_i+1}, X_{i,n_i+2} for both groups, then applies one Gibbs sweep to state.
[[nodiscard]] PairedBlock sample_posterior_block(HdpState& state, const HdpParams& params,
                                                 Rng& rng);

// Draws the four block values only; the state is unchanged.
[[nodiscard]] PairedBlock sample_predictive_block(const HdpState& state, const HdpParams& params,
                                                  Rng& rng);

// Sequentially generates n1, n2 observations from the model.
[[nodiscard]] GroupedData sample_hdp_data(const HdpParams& params, std::size_t n1, std::size_t n2,
                                          Rng& rng);

// Truncated stick-breaking draw of (P1, P2) sharing the atoms of P0.
[[nodiscard]] MeasurePair sample_hdp_measures(const HdpParams& params, std::size_t truncation,
                                              Rng& rng);

// Truncated stick-breaking draw of a single DP(c, base).
[[nodiscard]] DiscreteMeasure sample_dp_measure(double c, const Dist& base, std::size_t truncation,
                                                Rng& rng);

}  // namespace kcorr
