#include "lagsym/sampling.hpp"

#include <cmath>
#include <mutex>
#include <thread>

#include "lagsym/catalog.hpp"

namespace lagsym {

Eigen::MatrixXd Rng::rotation(int d) {
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i) A.row(i) = gaussian(d).transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  if (Q.determinant() < 0) Q.col(0) = -Q.col(0);
  return Q;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = (count + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end]() {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

SampleCloud sample_cloud(const FibrationModel& m, const CloudOptions& opts) {
  SampleCloud cloud;
  cloud.seed = opts.seed;
  cloud.lo = opts.region_lo.size() ? opts.region_lo : m.box_lo;
  cloud.hi = opts.region_hi.size() ? opts.region_hi : m.box_hi;
  Rng rng(opts.seed);

  const int batch = std::max(64, opts.count);
  long long attempts = 0;
  const long long max_attempts =
      static_cast<long long>(opts.max_attempt_factor) * opts.count + 1000;
  while (static_cast<int>(cloud.points.size()) < opts.count) {
    if (attempts > max_attempts) {
      throw ConvergenceError("sample_cloud: acceptance rate too low for model " + m.name);
    }
    // Candidates are drawn single-threaded (determinism); the acceptance
    // test, which may involve an SVD, runs data-parallel.
    std::vector<Eigen::VectorXd> cand(static_cast<size_t>(batch));
    for (auto& c : cand) c = rng.uniform_box(cloud.lo, cloud.hi);
    std::vector<char> ok(cand.size(), 0);
    parallel_for(cand.size(), opts.jobs, [&](std::size_t i) {
      const Eigen::VectorXd& x = cand[i];
      if (!m.fibration.in_domain(x)) return;
      if (opts.avoid_seam && m.fibration.piecewise() &&
          std::abs(m.fibration.seam_value(x)) < m.seam_sample_margin) {
        return;
      }
      if (opts.require_regular && !is_regular(m, x, opts.regular_tol).regular) return;
      ok[i] = 1;
    });
    for (size_t i = 0; i < cand.size(); ++i) {
      if (ok[i] && static_cast<int>(cloud.points.size()) < opts.count) {
        cloud.points.push_back(cand[i]);
      }
    }
    attempts += batch;
  }
  return cloud;
}

std::vector<Eigen::VectorXd> sample_base(const FibrationModel& m, int count,
                                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(rng.uniform_box(m.base_lo, m.base_hi));
  return out;
}

}  // namespace lagsym
