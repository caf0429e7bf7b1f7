#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kcorr {

using Point = std::vector<double>;
using PointView = std::span<const double>;

// Row-major set of points in R^d.
class Points {
 public:
  Points() = default;
  explicit Points(std::size_t dim) : dim_(dim) {}
  Points(std::size_t dim, std::vector<double> flat);

  [[nodiscard]] static Points scalars(std::vector<double> values) {
    return Points(1, std::move(values));
  }

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  [[nodiscard]] bool empty() const { return flat_.empty(); }

  [[nodiscard]] PointView operator[](std::size_t i) const {
    return {flat_.data() + i * dim_, dim_};
  }
  [[nodiscard]] double scalar(std::size_t i) const { return flat_[i * dim_]; }

  void push_back(PointView p);
  void push_back(double v) { push_back(PointView(&v, 1)); }
  void reserve(std::size_t n) { flat_.reserve(n * dim_); }
  void append(const Points& other);

  [[nodiscard]] const std::vector<double>& flat() const { return flat_; }

 private:
  std::size_t dim_ = 1;
  std::vector<double> flat_;
};

}  // namespace kcorr
