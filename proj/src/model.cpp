#include "bdloss/model.hpp"

#include <stdexcept>

namespace bdloss {

std::string to_string(WeightMode m) {
  return m == WeightMode::kShared ? "shared" : "per_position";
}

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "shared") return WeightMode::kShared;
  if (s == "per_position") return WeightMode::kPerPosition;
  throw std::invalid_argument("unknown weight mode '" + s + "'");
}

LinearModel::LinearModel(WeightMode mode, int d, int p, bool augmented)
    : mode_(mode), d_(d), p_(p), augmented_(augmented) {
  if (d < 1) throw std::invalid_argument("LinearModel: feature dimension must be >= 1");
  if (mode == WeightMode::kPerPosition && p < 1) {
    throw std::invalid_argument("LinearModel: per_position mode needs p >= 1");
  }
  w_.assign(static_cast<std::size_t>(dim()), 0.0);
}

int LinearModel::dim() const {
  return mode_ == WeightMode::kShared ? block_dim() : block_dim() * p_;
}

void LinearModel::check_bag(const Bag& x) const {
  if (mode_ == WeightMode::kPerPosition && static_cast<int>(x.size()) != p_) {
    throw std::invalid_argument("bag has " + std::to_string(x.size()) + " items, per_position model expects " +
                                std::to_string(p_));
  }
  for (const auto& xj : x) {
    if (static_cast<int>(xj.size()) != d_) {
      throw std::invalid_argument("feature dimension " + std::to_string(xj.size()) + " does not match model d = " +
                                  std::to_string(d_));
    }
  }
}

std::vector<double> LinearModel::scores(const Bag& x) const {
  check_bag(x);
  const int b = block_dim();
  std::vector<double> h(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const std::size_t off = mode_ == WeightMode::kShared ? 0 : j * b;
    double s = 0.0;
    for (int k = 0; k < b; ++k) s += w_[off + k] * feature(x[j], k);
    h[j] = s;
  }
  return h;
}

std::vector<int> LinearModel::predict(const Bag& x) const {
  const auto h = scores(x);
  return sign_labels(h);
}

std::vector<double> LinearModel::lift(const Bag& x, std::span<const double> coeffs) const {
  if (coeffs.size() != x.size()) throw std::invalid_argument("lift: coefficient count does not match bag size");
  const int b = block_dim();
  std::vector<double> g(static_cast<std::size_t>(dim()), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (coeffs[j] == 0.0) continue;
    const std::size_t off = mode_ == WeightMode::kShared ? 0 : j * b;
    for (int k = 0; k < b; ++k) g[off + k] += coeffs[j] * feature(x[j], k);
  }
  return g;
}

std::vector<int> sign_labels(std::span<const double> h) {
  std::vector<int> y(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) y[j] = h[j] >= 0.0 ? 1 : -1;
  return y;
}

}  // namespace bdloss
