#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lagsym/model.hpp"

namespace lagsym {

/// Explicitly seeded RNG; all randomized procedures take one (or a seed) so
/// runs are reproducible and worker-count independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  std::uint64_t next_seed() { return gen_(); }

  Eigen::VectorXd uniform_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd x(lo.size());
    for (int i = 0; i < lo.size(); ++i) x[i] = uniform(lo[i], hi[i]);
    return x;
  }
  /// Standard normal vector.
  Eigen::VectorXd gaussian(int d) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x[i] = n(gen_);
    return x;
  }
  /// Haar-ish random rotation (QR of a Gaussian matrix, det +1).
  Eigen::MatrixXd rotation(int d);

 private:
  std::mt19937_64 gen_;
};

/// Deterministic parallel loop: the work is split into contiguous chunks, so
/// results written by index are identical for any worker count.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

/// Points sampled from a region box, filtered by the model's domain (and
/// optionally regularity / seam margin).
struct SampleCloud {
  std::vector<Eigen::VectorXd> points;
  std::uint64_t seed = 0;
  Eigen::VectorXd lo, hi;
};

struct CloudOptions {
  int count = 1000;
  std::uint64_t seed = 42;
  bool require_regular = false;
  double regular_tol = 1e-6;
  bool avoid_seam = true;  // respect the model's seam sampling margin
  int jobs = 1;
  Eigen::VectorXd region_lo, region_hi;  // empty = model default box
  int max_attempt_factor = 200;
};

SampleCloud sample_cloud(const FibrationModel& m, const CloudOptions& opts);

/// Random base points inside the model's base box.
std::vector<Eigen::VectorXd> sample_base(const FibrationModel& m, int count,
                                         std::uint64_t seed);

}  // namespace lagsym
