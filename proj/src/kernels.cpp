#include "kcorr/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "kcorr/errors.hpp"
#include "text.hpp"

namespace kcorr {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(what) + " must be positive and finite");
  }
}

double sq_dist(PointView x, PointView y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - y[j];
    s += d * d;
  }
  return s;
}

double l1_dist(PointView x, PointView y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += std::abs(x[j] - y[j]);
  return s;
}

std::size_t parse_dim(const detail::TaggedParams& t) {
  const double d = t.number("d", 1.0);
  if (d < 1.0 || d != std::floor(d)) throw InputError("kernel dimension must be a positive integer");
  return static_cast<std::size_t>(d);
}

std::pair<double, double> parse_interval(const std::string& s) {
  if (s.size() < 5 || s.front() != '[' || s.back() != ']') {
    throw InputError("expected an interval [lo,hi], got '" + s + "'");
  }
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InputError("expected an interval [lo,hi], got '" + s + "'");
  return {detail::parse_double(s.substr(1, comma - 1)),
          detail::parse_double(s.substr(comma + 1, s.size() - comma - 2))};
}

}  // namespace

KernelSpec KernelSpec::gaussian(double sigma, std::size_t dim) {
  require_positive(sigma, "gaussian sigma");
  if (dim == 0) throw InputError("kernel dimension must be positive");
  KernelSpec k;
  k.kind_ = KernelKind::gaussian;
  k.dim_ = dim;
  k.p0_ = sigma;
  k.bound_ = 1.0;
  return k;
}

KernelSpec KernelSpec::laplace(double beta, std::size_t dim) {
  require_positive(beta, "laplace beta");
  if (dim == 0) throw InputError("kernel dimension must be positive");
  KernelSpec k;
  k.kind_ = KernelKind::laplace;
  k.dim_ = dim;
  k.p0_ = beta;
  k.bound_ = 1.0;
  return k;
}

KernelSpec KernelSpec::linear(double lo, double hi, std::size_t dim) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InputError("linear kernel needs a bounded domain lo < hi");
  }
  if (dim == 0) throw InputError("kernel dimension must be positive");
  KernelSpec k;
  k.kind_ = KernelKind::linear;
  k.dim_ = dim;
  k.p0_ = lo;
  k.p1_ = hi;
  k.bound_ = static_cast<double>(dim) * std::max(lo * lo, hi * hi);
  return k;
}

KernelSpec KernelSpec::setwise(std::vector<Box> boxes, std::size_t dim) {
  if (dim == 0) throw InputError("kernel dimension must be positive");
  if (boxes.empty()) throw InputError("setwise kernel needs at least one box");
  for (const auto& b : boxes) {
    if (b.lo.size() != dim || b.hi.size() != dim) throw InputError("setwise box dimension mismatch");
    for (std::size_t j = 0; j < dim; ++j) {
      if (!(b.lo[j] < b.hi[j])) throw InputError("setwise box needs lo < hi");
    }
  }
  KernelSpec k;
  k.kind_ = KernelKind::setwise;
  k.dim_ = dim;
  k.boxes_ = std::move(boxes);
  k.bound_ = 1.0;
  return k;
}

KernelSpec KernelSpec::setwise_interval(double a, double b, std::size_t dim) {
  return setwise({Box{std::vector<double>(dim, a), std::vector<double>(dim, b)}}, dim);
}

KernelSpec KernelSpec::mixture_gaussian(double amplitude, double lengthscale2, double s0,
                                        double sigma, std::size_t dim) {
  require_positive(amplitude, "mixture amplitude");
  require_positive(lengthscale2, "mixture lengthscale");
  if (dim == 0) throw InputError("kernel dimension must be positive");
  KernelSpec k;
  k.kind_ = KernelKind::mixture_gaussian;
  k.dim_ = dim;
  k.p0_ = amplitude;
  k.p1_ = lengthscale2;
  k.s0_ = s0;
  k.sigma_mix_ = sigma;
  k.bound_ = amplitude;
  return k;
}

KernelSpec KernelSpec::mixture_mc(const KernelSpec& base, MixtureFamily family, double s0,
                                  std::size_t L, std::uint64_t seed) {
  if (L == 0) throw InputError("mixture_mc needs L >= 1");
  if (base.kind() == KernelKind::linear) {
    throw InputError("mixture_mc: linear base would leave its declared domain");
  }
  if (family == MixtureFamily::normal) require_positive(s0, "mixture_mc s0");
  KernelSpec k;
  k.kind_ = KernelKind::mixture_mc;
  k.dim_ = base.dim();
  k.bound_ = base.bound();
  k.base_ = std::make_shared<const KernelSpec>(base);
  k.family_ = family;
  k.s0_ = family == MixtureFamily::dirac ? 0.0 : s0;
  k.draws_ = L;
  k.seed_ = seed;
  k.noise_.assign(L * k.dim_, 0.0);
  if (family == MixtureFamily::normal) {
    Rng rng(seed);
    std::normal_distribution<double> n01;
    for (auto& e : k.noise_) e = n01(rng);
  }
  return k;
}

KernelSpec KernelSpec::parse(std::string_view text) {
  const auto bar = text.find('|');
  const auto t = detail::parse_tagged(text.substr(0, bar));
  if (t.name == "mixmc") {
    if (bar == std::string_view::npos) throw InputError("mixmc needs a base kernel after '|'");
    const auto base = parse(text.substr(bar + 1));
    const auto* fam = t.find("family");
    MixtureFamily family = MixtureFamily::normal;
    if (fam && *fam == "dirac") family = MixtureFamily::dirac;
    else if (fam && *fam != "normal") throw InputError("unknown mixture family '" + *fam + "'");
    const double L = t.number("L", 64.0);
    if (L < 1.0) throw InputError("mixmc: L must be >= 1");
    return mixture_mc(base, family, t.number("s0", 1.0), static_cast<std::size_t>(L),
                      static_cast<std::uint64_t>(t.number("seed", 0.0)));
  }
  if (bar != std::string_view::npos) throw InputError("unexpected '|' in kernel spec");
  const std::size_t d = parse_dim(t);
  if (t.name == "gaussian") return gaussian(t.required("sigma"), d);
  if (t.name == "laplace") return laplace(t.required("beta"), d);
  if (t.name == "linear") {
    const auto* dom = t.find("domain");
    if (!dom) throw InputError("linear kernel needs domain=[lo,hi]");
    const auto [lo, hi] = parse_interval(*dom);
    return linear(lo, hi, d);
  }
  if (t.name == "setwise") {
    std::vector<Box> boxes;
    double a = 0.0;
    bool have_a = false;
    for (const auto& [key, val] : t.kv) {
      if (key == "a") {
        a = detail::parse_double(val);
        have_a = true;
      } else if (key == "b") {
        if (!have_a) throw InputError("setwise: each b needs a preceding a");
        const double b = detail::parse_double(val);
        boxes.push_back(Box{std::vector<double>(d, a), std::vector<double>(d, b)});
        have_a = false;
      } else if (key != "d") {
        throw InputError("setwise: unknown parameter '" + key + "'");
      }
    }
    if (have_a) throw InputError("setwise: dangling a without b");
    return setwise(std::move(boxes), d);
  }
  if (t.name == "mixgauss") {
    if (d != 1) throw InputError("mixgauss is one-dimensional");
    return mixture_updated_gaussian(t.required("s0"), t.required("sigma"));
  }
  throw InputError("unknown kernel '" + t.name + "'");
}

std::string KernelSpec::to_string() const {
  using detail::format_double;
  const std::string dsuf = dim_ == 1 ? "" : ",d=" + std::to_string(dim_);
  switch (kind_) {
    case KernelKind::gaussian:
      return "gaussian:sigma=" + format_double(p0_) + dsuf;
    case KernelKind::laplace:
      return "laplace:beta=" + format_double(p0_) + dsuf;
    case KernelKind::linear:
      return "linear:domain=[" + format_double(p0_) + "," + format_double(p1_) + "]" + dsuf;
    case KernelKind::setwise: {
      std::string s = "setwise:";
      for (std::size_t i = 0; i < boxes_.size(); ++i) {
        if (i) s += ",";
        s += "a=" + format_double(boxes_[i].lo[0]) + ",b=" + format_double(boxes_[i].hi[0]);
      }
      return s + dsuf;
    }
    case KernelKind::mixture_gaussian:
      return "mixgauss:s0=" + format_double(s0_) + ",sigma=" + format_double(sigma_mix_);
    case KernelKind::mixture_mc:
      return std::string("mixmc:family=") +
             (family_ == MixtureFamily::dirac ? "dirac" : "normal") + ",s0=" + format_double(s0_) +
             ",L=" + std::to_string(draws_) + ",seed=" + std::to_string(seed_) + "|" +
             base_->to_string();
  }
  return {};
}

bool KernelSpec::characteristic() const {
  switch (kind_) {
    case KernelKind::gaussian:
    case KernelKind::laplace:
    case KernelKind::mixture_gaussian:
      return true;
    case KernelKind::mixture_mc:
      return base_->characteristic();
    default:
      return false;
  }
}

bool KernelSpec::contains(PointView x) const {
  for (const auto& b : boxes_) {
    bool in = true;
    for (std::size_t j = 0; j < dim_ && in; ++j) in = b.lo[j] <= x[j] && x[j] < b.hi[j];
    if (in) return true;
  }
  return false;
}

bool KernelSpec::in_domain(PointView x) const {
  if (kind_ != KernelKind::linear) return true;
  for (std::size_t j = 0; j < dim_; ++j) {
    if (!(p0_ <= x[j] && x[j] <= p1_)) return false;
  }
  return true;
}

double KernelSpec::eval_unchecked(PointView x, PointView y) const {
  switch (kind_) {
    case KernelKind::gaussian:
      return std::exp(-sq_dist(x, y) / (2.0 * p0_ * p0_));
    case KernelKind::laplace:
      return std::exp(-l1_dist(x, y) / p0_);
    case KernelKind::linear: {
      double s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) s += x[j] * y[j];
      return s;
    }
    case KernelKind::setwise:
      return contains(x) && contains(y) ? 1.0 : 0.0;
    case KernelKind::mixture_gaussian:
      return p0_ * std::exp(-sq_dist(x, y) / (2.0 * p1_));
    case KernelKind::mixture_mc: {
      const std::size_t L = draws_;
      std::vector<double> ya(dim_), yb(dim_);
      auto shifted = [&](PointView p, std::size_t a, std::vector<double>& out) {
        for (std::size_t j = 0; j < dim_; ++j) out[j] = p[j] + s0_ * noise_[a * dim_ + j];
      };
      double total = 0.0;
      for (std::size_t a = 0; a < L; ++a) {
        shifted(x, a, ya);
        shifted(y, a, yb);
        total += base_->eval_unchecked(ya, yb);
      }
      for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = a + 1; b < L; ++b) {
          shifted(x, a, ya);
          shifted(y, b, yb);
          const double tab = base_->eval_unchecked(ya, yb);
          shifted(x, b, ya);
          shifted(y, a, yb);
          const double tba = base_->eval_unchecked(ya, yb);
          total += tab + tba;
        }
      }
      return total / (static_cast<double>(L) * static_cast<double>(L));
    }
  }
  return 0.0;
}

double eval(const KernelSpec& k, PointView x, PointView y) {
  if (x.size() != k.dim() || y.size() != k.dim()) throw InputError("kernel: dimension mismatch");
  if (!k.in_domain(x) || !k.in_domain(y)) {
    throw InputError("linear kernel: point outside the declared domain");
  }
  return k.eval_unchecked(x, y);
}

double eval(const KernelSpec& k, double x, double y) {
  return eval(k, PointView(&x, 1), PointView(&y, 1));
}

double dk2(const KernelSpec& k, PointView x, PointView y) {
  const double v = eval(k, x, x) - 2.0 * eval(k, x, y) + eval(k, y, y);
  return v < 0.0 ? 0.0 : v;
}

double dk2(const KernelSpec& k, double x, double y) {
  return dk2(k, PointView(&x, 1), PointView(&y, 1));
}

KernelSpec mixture_updated_gaussian(double s0, double sigma) {
  require_positive(s0, "s0");
  require_positive(sigma, "sigma");
  const double l2 = 2.0 * s0 * s0 + sigma * sigma;
  return KernelSpec::mixture_gaussian(std::sqrt(sigma * sigma / l2), l2, s0, sigma);
}

DensitySampler dirac_sampler() {
  return [](PointView x, Rng&, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); };
}

DensitySampler normal_location_sampler(double s0) {
  require_positive(s0, "s0");
  return [s0](PointView x, Rng& rng, std::span<double> y) {
    std::normal_distribution<double> n01;
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = x[j] + s0 * n01(rng);
  };
}

double mixture_kernel_mc(const KernelSpec& base, const DensitySampler& sampler, std::size_t L,
                         PointView x1, PointView x2, Rng& rng) {
  if (L == 0) throw InputError("mixture_kernel_mc needs L >= 1");
  if (x1.size() != base.dim() || x2.size() != base.dim()) {
    throw InputError("kernel: dimension mismatch");
  }
  std::vector<double> y1(base.dim()), y2(base.dim());
  double mean = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    sampler(x1, rng, y1);
    sampler(x2, rng, y2);
    const double v = eval(base, y1, y2);
    mean = l == 0 ? v : mean + (v - mean) / static_cast<double>(l + 1);
  }
  return mean;
}

}  // namespace kcorr
