#include "kcorr/random.hpp"

#include <cmath>

#include "kcorr/errors.hpp"
#include "text.hpp"

namespace kcorr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Dist Dist::uniform(double lo, double hi) {
  if (!(lo < hi)) throw InputError("uniform: need a < b");
  return Dist{Family::uniform, lo, hi};
}

Dist Dist::normal(double mu, double var) {
  if (!(var > 0.0)) throw InputError("normal: variance must be positive");
  return Dist{Family::normal, mu, var};
}

Dist Dist::parse(std::string_view text) {
  const auto t = detail::parse_tagged(text);
  if (t.name == "uniform" || t.name == "unif") {
    return uniform(t.number("a", 0.0), t.number("b", 1.0));
  }
  if (t.name == "normal" || t.name == "gauss") {
    return normal(t.number("mu", 0.0), t.number("var", 1.0));
  }
  throw InputError("unknown distribution family '" + t.name + "'");
}

std::string Dist::to_string() const {
  if (family == Family::uniform) {
    return "uniform:a=" + detail::format_double(a) + ",b=" + detail::format_double(b);
  }
  return "normal:mu=" + detail::format_double(a) + ",var=" + detail::format_double(b);
}

double Dist::sample(Rng& rng) const {
  if (family == Family::uniform) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  }
  return std::normal_distribution<double>(a, std::sqrt(b))(rng);
}

double Dist::mean() const { return family == Family::uniform ? 0.5 * (a + b) : a; }

double Dist::variance() const {
  return family == Family::uniform ? (b - a) * (b - a) / 12.0 : b;
}

}  // namespace kcorr
