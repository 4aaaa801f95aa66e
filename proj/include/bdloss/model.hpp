#pragma once

#include <span>
#include <string>
#include <vector>

namespace bdloss {

using Bag = std::vector<std::vector<double>>;

// One bag of p feature vectors with +-1 labels per position.
struct Sample {
  std::string bag_id;
  Bag x;
  std::vector<int> y;

  int size() const { return static_cast<int>(y.size()); }
};

enum class WeightMode { kShared, kPerPosition };

std::string to_string(WeightMode m);
WeightMode parse_weight_mode(const std::string& s);

// h^j(x) = <w, x^j> (shared) or <w^j, x^j> (per position). With
// `augmented`, every feature vector gets a trailing constant 1.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(WeightMode mode, int d, int p = 0, bool augmented = false);

  WeightMode mode() const { return mode_; }
  int feature_dim() const { return d_; }
  int positions() const { return p_; }
  bool augmented() const { return augmented_; }
  // Length of one weight block (d, or d + 1 when augmented).
  int block_dim() const { return d_ + (augmented_ ? 1 : 0); }
  int dim() const;

  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }

  std::vector<double> scores(const Bag& x) const;
  std::vector<int> predict(const Bag& x) const;

  // Maps a score-space coefficient vector a (one entry per position) to the
  // weight-space vector sum_j a_j d h^j / d w.
  std::vector<double> lift(const Bag& x, std::span<const double> coeffs) const;

  void check_bag(const Bag& x) const;

 private:
  double feature(const std::vector<double>& xj, int k) const {
    return k < d_ ? xj[k] : 1.0;
  }

  WeightMode mode_ = WeightMode::kShared;
  int d_ = 0;
  int p_ = 0;
  bool augmented_ = false;
  std::vector<double> w_;
};

// sign(h) with sign(0) = +1.
std::vector<int> sign_labels(std::span<const double> h);

}  // namespace bdloss
