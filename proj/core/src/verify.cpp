#include "lagsym/verify.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <unordered_map>

#include "lagsym/affine.hpp"
#include "lagsym/calculus.hpp"
#include "lagsym/catalog.hpp"

namespace lagsym {

namespace {

double parallel_max(std::size_t count, int jobs, const std::function<double(std::size_t)>& fn) {
  std::vector<double> vals(count, 0.0);
  parallel_for(count, jobs, [&](std::size_t i) { vals[i] = fn(i); });
  double worst = 0.0;
  for (double v : vals) worst = std::max(worst, v);
  return worst;
}

}  // namespace

double verify_fiber_preserving(const FibrationModel& m, const SmoothMap& map,
                               const SampleCloud& cloud, int jobs) {
  return parallel_max(cloud.points.size(), jobs, [&](std::size_t i) {
    const Eigen::VectorXd& x = cloud.points[i];
    const Eigen::VectorXd y = map(x);
    if (!m.fibration.in_domain(y)) {
      throw DomainError("verify_fiber_preserving: image left the domain");
    }
    return (m.fibration(y) - m.fibration(x)).cwiseAbs().maxCoeff();
  });
}

double verify_involution(const FibrationModel& m, const SmoothMap& map,
                         const SampleCloud& cloud, int jobs) {
  return parallel_max(cloud.points.size(), jobs, [&](std::size_t i) {
    const Eigen::VectorXd& x = cloud.points[i];
    return m.distance(map(map(x)), x);
  });
}

double verify_commutation(const FibrationModel& m, const SmoothMap& phi, const SmoothMap& t,
                          const SmoothMap& t_inverse, const SampleCloud& cloud, int jobs) {
  return parallel_max(cloud.points.size(), jobs, [&](std::size_t i) {
    const Eigen::VectorXd& x = cloud.points[i];
    return m.distance(phi(t_inverse(x)), t(phi(x)));
  });
}

double verify_pullback(const FibrationModel& m, const SmoothMap& map, int sign,
                       const SampleCloud& cloud, int jobs) {
  return parallel_max(cloud.points.size(), jobs, [&](std::size_t i) {
    return pullback_residual(m.structure, map, cloud.points[i], sign);
  });
}

double verify_lagrangian_fibers(const FibrationModel& m, const SampleCloud& cloud,
                                double rank_tol, int jobs) {
  return parallel_max(cloud.points.size(), jobs, [&](std::size_t i) {
    return lagrangian_residual(m.structure, m.fibration, cloud.points[i], rank_tol);
  });
}

double domain_gap(const FibrationModel& m, const Eigen::VectorXd& x) {
  using cd = std::complex<double>;
  if (m.name == "nodal" || m.name == "generic_singular") {
    const cd z1{x[0], x[m.name == "nodal" ? 2 : 3]}, z2{x[1], x[m.name == "nodal" ? 3 : 4]};
    return std::abs(z1 * z2 + 1.0);
  }
  if (m.name == "positive_proper") {
    const cd z1{x[0], x[3]}, z2{x[1], x[4]}, z3{x[2], x[5]};
    return std::abs(z1 * z2 * z3 + 1.0);
  }
  if (m.name == "negative_amoeba" || m.name == "negative_thin") {
    // smallest modulus of the transformed reduced coordinates
    const Eigen::VectorXd f = m.fibration(x);
    return std::exp(std::min(f[1], f[2]));
  }
  return 1.0;
}

namespace {

// Spatial hash over cells of size `cell`, on wrapped coordinates.
struct CellHash {
  double cell;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;

  static std::uint64_t mix(std::uint64_t h, long long v) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
  std::uint64_t key(const Eigen::VectorXd& x) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (int i = 0; i < x.size(); ++i) {
      h = mix(h, static_cast<long long>(std::floor(x[i] / cell)));
    }
    return h;
  }
  void insert(const Eigen::VectorXd& x, int idx) { buckets[key(x)].push_back(idx); }

  template <class Fn>
  void for_neighbors(const Eigen::VectorXd& x, Fn fn) const {
    const int d = static_cast<int>(x.size());
    Eigen::VectorXd probe = x;
    std::vector<int> offset(static_cast<size_t>(d), -1);
    while (true) {
      for (int i = 0; i < d; ++i) probe[i] = x[i] + offset[static_cast<size_t>(i)] * cell;
      auto it = buckets.find(key(probe));
      if (it != buckets.end()) {
        for (int idx : it->second) fn(idx);
      }
      int i = 0;
      for (; i < d; ++i) {
        if (++offset[static_cast<size_t>(i)] <= 1) break;
        offset[static_cast<size_t>(i)] = -1;
      }
      if (i == d) break;
    }
  }
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  }
  int find(int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

CensusResult fixed_locus_census(const FibrationModel& m, const SmoothMap& map,
                                const CensusOptions& opts) {
  CensusResult res;
  res.seed = opts.seed;
  res.n_samples = opts.n_samples;

  const Eigen::VectorXd lo = opts.region_lo.size() ? opts.region_lo : m.box_lo;
  const Eigen::VectorXd hi = opts.region_hi.size() ? opts.region_hi : m.box_hi;
  const int n = m.base_dim;
  double eps_link = opts.eps_link;
  if (eps_link <= 0.0) {
    const double diameter = (hi - lo).norm();
    eps_link = 4.0 * diameter / std::pow(static_cast<double>(opts.n_samples), 1.0 / n);
  }
  res.eps_link = eps_link;

  // 1. Draw samples (single-threaded for determinism), refine each toward the
  //    fixed locus by midpoint projection, accept the converged ones.
  Rng rng(opts.seed);
  std::vector<Eigen::VectorXd> raw(static_cast<size_t>(opts.n_samples));
  for (auto& x : raw) x = rng.uniform_box(lo, hi);

  std::vector<Eigen::VectorXd> fixed(raw.size());
  std::vector<char> good(raw.size(), 0);
  parallel_for(raw.size(), opts.jobs, [&](std::size_t i) {
    Eigen::VectorXd x = raw[i];
    if (!m.fibration.in_domain(x)) return;
    for (int it = 0; it < opts.refine_iters; ++it) {
      if (!m.fibration.in_domain(x)) return;
      const Eigen::VectorXd y = m.wrap_to_near(map(x), x);
      if ((y - x).norm() <= opts.eps_fix) break;
      x = 0.5 * (x + y);
    }
    if (!m.fibration.in_domain(x)) return;
    if (m.distance(map(x), x) > opts.eps_fix) return;
    if (domain_gap(m, x) <= opts.domain_gap) return;
    for (int c = 0; c < x.size(); ++c) {
      if (x[c] < lo[c] - eps_link || x[c] > hi[c] + eps_link) return;
    }
    fixed[i] = m.wrap(x);
    good[i] = 1;
  });

  std::vector<Eigen::VectorXd> pts;
  pts.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (good[i]) pts.push_back(fixed[i]);
  }
  res.n_fixed = static_cast<int>(pts.size());
  if (pts.empty()) {
    throw ConvergenceError("fixed_locus_census: no fixed samples; check region/sampling");
  }

  // 2. eps-neighbor graph with a segment-interior domain check, so removed
  //    hypersurfaces actually separate components.
  CellHash hash{eps_link, {}};
  for (size_t i = 0; i < pts.size(); ++i) hash.insert(pts[i], static_cast<int>(i));
  UnionFind uf(static_cast<int>(pts.size()));
  // A link is valid only when the segment between the samples stays clear of
  // the removed hypersurfaces: the gap must neither fall below the sampling
  // threshold nor dip far below its endpoint values (a crossing drives it to
  // zero somewhere along the way).
  auto segment_clear = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b_raw) {
    const Eigen::VectorXd b = m.wrap_to_near(b_raw, a);
    const double end_gap = std::min(domain_gap(m, a), domain_gap(m, b));
    for (int k = 1; k <= 9; ++k) {
      const Eigen::VectorXd mid = a + (k / 10.0) * (b - a);
      if (!m.fibration.in_domain(mid)) return false;
      const double g = domain_gap(m, mid);
      if (g <= 0.5 * opts.domain_gap || g <= 0.4 * end_gap) return false;
    }
    return true;
  };
  for (size_t i = 0; i < pts.size(); ++i) {
    const int ii = static_cast<int>(i);
    hash.for_neighbors(pts[i], [&](int j) {
      if (j >= ii) return;
      if (uf.find(ii) == uf.find(j)) return;
      if (m.distance(pts[i], pts[static_cast<size_t>(j)]) > eps_link) return;
      if (!segment_clear(pts[i], pts[static_cast<size_t>(j)])) return;
      uf.unite(ii, j);
    });
  }

  // 3. Collect components (drop noise), then flag sections by per-fiber
  //    injectivity on the samples.
  std::unordered_map<int, std::vector<int>> comps;
  for (size_t i = 0; i < pts.size(); ++i) {
    comps[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
  }
  std::vector<std::pair<int, std::vector<int>>> ordered(comps.begin(), comps.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::unordered_map<int, int> root_to_component;
  for (auto& [root, members] : ordered) {
    if (static_cast<int>(members.size()) < opts.min_component) continue;
    root_to_component[root] = static_cast<int>(res.components.size());
    ComponentInfo info;
    info.representative = pts[static_cast<size_t>(members.front())];
    info.count = static_cast<int>(members.size());
    res.components.push_back(std::move(info));
  }
  res.component_count = static_cast<int>(res.components.size());

  // Per-fiber intersection counts: solve for all fixed points on a few
  // sampled fibers per component and attribute each solution to the
  // component of its nearest census sample.  A component meeting every
  // sampled fiber once is flagged as a section.
  {
    auto component_of = [&](const Eigen::VectorXd& q) {
      int best = -1;
      double best_d = 1e300;
      for (size_t i = 0; i < pts.size(); ++i) {
        const double d = m.distance(q, pts[i]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(i);
        }
      }
      if (best < 0 || best_d > 4.0 * eps_link) return -1;
      auto it = root_to_component.find(uf.find(best));
      return it == root_to_component.end() ? -1 : it->second;
    };
    std::vector<int> max_per_fiber(res.components.size(), 0);
    Rng frng(opts.seed + 101);
    for (size_t ci = 0; ci < res.components.size(); ++ci) {
      // fiber probes: spread members of this component, away from the
      // discriminant
      std::vector<Eigen::VectorXd> fibers;
      for (auto& [root, members] : ordered) {
        auto it = root_to_component.find(root);
        if (it == root_to_component.end() || it->second != static_cast<int>(ci)) continue;
        for (int attempt = 0; attempt < 24 && fibers.size() < 2; ++attempt) {
          const size_t pick = static_cast<size_t>(
              frng.uniform(0.0, static_cast<double>(members.size()) - 0.5));
          const Eigen::VectorXd b = m.fibration(pts[static_cast<size_t>(members[pick])]);
          double dd = 1.0;
          try {
            dd = descriptor_distance(m, b);
          } catch (const Error&) {
          }
          if (dd > 0.3) fibers.push_back(b);
        }
      }
      for (const auto& b : fibers) {
        FiberFixedOptions fopts;
        fopts.seed = frng.next_seed();
        fopts.jobs = opts.jobs;
        fopts.n_seeds = 96;
        FiberFixedResult fr;
        try {
          fr = fiber_fixed_count(m, map, b, fopts);
        } catch (const Error&) {
          continue;
        }
        int mine = 0;
        for (const auto& q : fr.points) {
          if (component_of(q) == static_cast<int>(ci)) ++mine;
        }
        max_per_fiber[ci] = std::max(max_per_fiber[ci], mine);
      }
    }
    for (size_t ci = 0; ci < res.components.size(); ++ci) {
      res.components[ci].max_per_fiber = max_per_fiber[ci];
      res.components[ci].section_flag = max_per_fiber[ci] == 1;
    }
  }

  // 4. Locate probe points: nearest accepted fixed sample, then its
  //    component.
  for (const auto& probe : opts.probes) {
    int best = -1;
    double best_d = 8.0 * eps_link;
    for (size_t i = 0; i < pts.size(); ++i) {
      const double d = m.distance(probe, pts[i]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    int comp = -1;
    if (best >= 0) {
      auto it = root_to_component.find(uf.find(best));
      if (it != root_to_component.end()) comp = it->second;
    }
    res.probe_components.push_back(comp);
  }
  return res;
}

FiberFixedResult fiber_fixed_count(const FibrationModel& m, const SmoothMap& map,
                                   const Eigen::VectorXd& b, const FiberFixedOptions& opts) {
  FiberFixedResult out;
  Rng rng(opts.seed);
  std::vector<Eigen::VectorXd> seeds(static_cast<size_t>(opts.n_seeds));
  for (auto& s : seeds) s = rng.uniform_box(m.box_lo, m.box_hi);

  std::vector<Eigen::VectorXd> sols(seeds.size());
  std::vector<char> good(seeds.size(), 0);
  parallel_for(seeds.size(), opts.jobs, [&](std::size_t i) {
    Eigen::VectorXd x = seeds[i];
    for (int it = 0; it < opts.max_iter; ++it) {
      // project to the fixed locus (exact in one step for linear involutions)
      if (!m.fibration.in_domain(x)) return;
      x = 0.5 * (x + m.wrap_to_near(map(x), x));
      if (!m.fibration.in_domain(x)) return;
      Eigen::VectorXd r = m.fibration(x) - b;
      if (r.norm() <= opts.solve_tol && m.distance(map(x), x) <= opts.solve_tol) break;
      Eigen::MatrixXd J;
      try {
        J = jacobian(m.fibration, x);
      } catch (const SeamError&) {
        J = jacobian_one_sided(m.fibration, x, +1);
      } catch (const Error&) {
        return;
      }
      Eigen::VectorXd step = J.transpose() * (J * J.transpose()).ldlt().solve(r);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 10; ++ls) {
        Eigen::VectorXd xn = x - alpha * step;
        if (m.fibration.in_domain(xn) && (m.fibration(xn) - b).norm() < r.norm()) {
          x = xn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) return;
    }
    if (!m.fibration.in_domain(x)) return;
    if ((m.fibration(x) - b).norm() <= opts.solve_tol &&
        m.distance(map(x), x) <= opts.solve_tol) {
      sols[i] = m.wrap(x);
      good[i] = 1;
    }
  });

  std::vector<Eigen::VectorXd> converged;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (good[i]) converged.push_back(sols[i]);
  }
  out.coverage = static_cast<double>(converged.size()) / static_cast<double>(seeds.size());
  if (out.coverage < opts.min_coverage) {
    throw ConvergenceError("fiber_fixed_count: coverage " + std::to_string(out.coverage) +
                           " too low; fiber likely unexplored");
  }
  for (const auto& p : converged) {
    bool matched = false;
    for (const auto& q : out.points) {
      if (m.distance(p, q) <= opts.cluster_radius) {
        matched = true;
        break;
      }
    }
    if (!matched) out.points.push_back(p);
  }
  out.count = static_cast<int>(out.points.size());
  return out;
}

}  // namespace lagsym
