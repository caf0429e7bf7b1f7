#include "kcorr/points.hpp"

#include "kcorr/errors.hpp"

namespace kcorr {

Points::Points(std::size_t dim, std::vector<double> flat) : dim_(dim), flat_(std::move(flat)) {
  if (dim_ == 0) throw InputError("points: dimension must be positive");
  if (flat_.size() % dim_ != 0) throw InputError("points: flat size not a multiple of dimension");
}

void Points::push_back(PointView p) {
  if (p.size() != dim_) throw InputError("points: dimension mismatch");
  flat_.insert(flat_.end(), p.begin(), p.end());
}

void Points::append(const Points& other) {
  if (other.empty()) return;
  if (other.dim_ != dim_) throw InputError("points: dimension mismatch");
  flat_.insert(flat_.end(), other.flat_.begin(), other.flat_.end());
}

}  // namespace kcorr
