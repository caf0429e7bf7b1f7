#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace kcorr {

using Rng = std::mt19937_64;

// Deterministic sub-seed for (seed, index); used for per-cell and per-repetition streams.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

[[nodiscard]] inline Rng make_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(derive_seed(seed, index));
}

// Atomless scalar distribution used as a base measure or a data generator.
struct Dist {
  enum class Family { uniform, normal };
  Family family = Family::uniform;
  double a = 0.0;  // uniform lower bound, or normal mean
  double b = 1.0;  // uniform upper bound, or normal variance

  [[nodiscard]] static Dist uniform(double lo, double hi);
  [[nodiscard]] static Dist normal(double mu, double var);

  // Text forms: "uniform:a=0,b=1", "normal:mu=0,var=2".
  [[nodiscard]] static Dist parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] double sample(Rng& rng) const;
  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;
};

}  // namespace kcorr
