#ifndef INCLUDE_GIBBSDP_DIAGNOSTICS_HPP
#define INCLUDE_GIBBSDP_DIAGNOSTICS_HPP

// Boundary influence against the disagreement-percolation bound, uniqueness
// scans over growing windows and decay of correlations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "coupling.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "percolation.hpp"
#include "poisson.hpp"
#include "space.hpp"
#include "stats.hpp"

namespace gibbsdp {

template<int D>
using Event = std::function<bool(const Configuration<D>&)>;

struct InfluenceReport {
  double direct_gap;
  double gap_se;
  double percolation_bound;
  double bound_se;
  std::size_t reps;
  bool holds;
};

/// |P1(E) - P2(E)| from the two coupled copies restricted to the box Lambda1,
/// against P(Lambda1 <-> gamma1 u gamma2 in xi3) from the same samples.
template<typename Model, int D>
InfluenceReport boundary_influence(const Model& model, double lambda, const RadiusLaw& law, const Window<D>& window,
                                   const BoxProbe<D>& inner, const Configuration<D>& gamma1,
                                   const Configuration<D>& gamma2, const Event<D>& event, std::size_t reps,
                                   std::uint64_t seed, const CouplingOptions& options = {}) {
  const double alpha = dom_level(model, lambda);
  const Probe<D> source = inner;
  const Probe<D> boundary = ConfigurationProbe<D>{merge(gamma1, gamma2)};
  RunningStats diff;
  std::size_t connections = 0;
  for(std::size_t r = 0; r < reps; ++r) {
    const auto s = disagreement_sample(model, lambda, alpha, law, window, gamma1, gamma2, seed, r, options);
    const double e1 = event(restrict_to_box(s.xi1, inner)) ? 1.0 : 0.0;
    const double e2 = event(restrict_to_box(s.xi2, inner)) ? 1.0 : 0.0;
    diff.add(e1 - e2);
    connections += connected(s.xi3, source, boundary) ? 1 : 0;
  }
  InfluenceReport rep{};
  rep.reps = reps;
  rep.direct_gap = std::abs(diff.mean());
  rep.gap_se = diff.standard_error();
  const auto bound = binomial_estimate(connections, reps);
  rep.percolation_bound = bound.p;
  rep.bound_se = bound.se;
  rep.holds = rep.direct_gap <= rep.percolation_bound + 3.0 * std::hypot(rep.gap_se, rep.bound_se);
  return rep;
}

/// Balls of radius `radius` on the lattice spacing * Z^D, outside the window
/// [-half, half)^D and close enough to reach a ball of the window.
template<int D>
Configuration<D> dense_grid_boundary(double half, double r_max, double radius, double spacing, int frac_bits = 32) {
  std::array<double, D> lo{}, hi{};
  lo.fill(-half);
  hi.fill(half);
  const Window<D> window(lo, hi, r_max, frac_bits);
  const double reach = radius + r_max;
  const long steps = static_cast<long>(std::ceil((half + reach) / spacing));
  Configuration<D> out;
  std::array<long, D> idx{};
  idx.fill(-steps);
  BoxProbe<D> box{window.lo(), window.hi()};
  while(true) {
    std::array<double, D> x{};
    for(int i = 0; i < D; ++i) {
      x[i] = static_cast<double>(idx[i]) * spacing;
    }
    const Point<D> p = Point<D>::from_double(x, radius);
    const i128 rr = to_raw(reach);
    if(!window.contains_center(p.center) && squared_distance_to_box<D>(p.center, box) <= rr * rr) {
      out.insert(p);
    }
    int i = 0;
    while(i < D && ++idx[i] > steps) {
      idx[i] = -steps;
      ++i;
    }
    if(i == D) {
      break;
    }
  }
  return out;
}

struct UniquenessRow {
  double n;
  double gap;
  double se;
  std::size_t worst_pair_a;
  std::size_t worst_pair_b;
  bool below_two_se;
};

/// For each n, the largest coupled gap |P(E | gamma_a) - P(E | gamma_b)| over
/// pairs of a boundary library on the window [-n, n)^D; E looks at the
/// points with centers in the box `inner`.
template<typename Model, int D>
std::vector<UniquenessRow> uniqueness_scan(
    const Model& model, double lambda, const RadiusLaw& law, const BoxProbe<D>& inner, const Event<D>& event,
    const std::vector<double>& n_grid, std::size_t reps, std::uint64_t seed,
    const std::function<std::vector<Configuration<D>>(double)>& library, int frac_bits = 32) {
  const double alpha = dom_level(model, lambda);
  std::vector<UniquenessRow> rows;
  for(std::size_t k = 0; k < n_grid.size(); ++k) {
    const double n = n_grid[k];
    std::array<double, D> lo{}, hi{};
    lo.fill(-n);
    hi.fill(n);
    const Window<D> window(lo, hi, law.support_max(), frac_bits);
    const auto boundaries = library(n);
    UniquenessRow row{n, 0.0, 0.0, 0, 0, true};
    for(std::size_t a = 0; a < boundaries.size(); ++a) {
      for(std::size_t b = a + 1; b < boundaries.size(); ++b) {
        RunningStats diff;
        for(std::size_t r = 0; r < reps; ++r) {
          const auto s = disagreement_sample(model, lambda, alpha, law, window, boundaries[a], boundaries[b],
                                             derive_seed(seed, k, a * 131 + b), r);
          const double e1 = event(restrict_to_box(s.xi1, inner)) ? 1.0 : 0.0;
          const double e2 = event(restrict_to_box(s.xi2, inner)) ? 1.0 : 0.0;
          diff.add(e1 - e2);
        }
        const double gap = std::abs(diff.mean());
        if(gap >= row.gap) {
          row.gap = gap;
          row.se = diff.standard_error();
          row.worst_pair_a = a;
          row.worst_pair_b = b;
        }
      }
    }
    row.below_two_se = row.gap <= 2.0 * row.se;
    rows.push_back(row);
  }
  return rows;
}

struct CorrelationRow {
  double separation;
  double event_cov;
  double event_se;
  double count_cov_density;
  double count_se;
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;
  DecayFit fit;
  bool fitted;
};

/// Covariances between a reference cell [a, a + c)^... along axis 0 and
/// translated copies at the given separations (distance between left
/// edges), from exact specification samples on the window. The decay fit
/// uses |cov(N1, N2)| / (L(cell1) L(cell2)).
template<typename Model, int D>
CorrelationReport correlation_decay(const Model& model, double lambda, const RadiusLaw& law, const Window<D>& window,
                                    const BoxProbe<D>& cell, const std::vector<double>& separations,
                                    const Event<D>& e, const Event<D>& f, std::size_t reps, std::uint64_t seed,
                                    int threads = 1) {
  const double alpha = dom_level(model, lambda);
  const OrderInterval<D> all{};
  double volume = 1.0;
  for(int i = 0; i < D; ++i) {
    volume *= to_double(cell.hi[i] - cell.lo[i]);
  }
  std::vector<BoxProbe<D>> shifted;
  for(const double s: separations) {
    BoxProbe<D> b = cell;
    b.lo[0] += to_raw(s);
    b.hi[0] += to_raw(s);
    shifted.push_back(b);
  }
  std::vector<double> n0(reps), e0(reps);
  std::vector<std::vector<double>> ns(separations.size(), std::vector<double>(reps));
  std::vector<std::vector<double>> fs(separations.size(), std::vector<double>(reps));
  // Half-open cells so adjacent cells never share a point.
  auto inside = [](const Configuration<D>& omega, const BoxProbe<D>& box) {
    Configuration<D> out;
    for(const auto& p: omega) {
      bool in = true;
      for(int i = 0; i < D; ++i) {
        in = in && p.center[i] >= box.lo[i] && p.center[i] < box.hi[i];
      }
      if(in) {
        out.insert(p);
      }
    }
    return out;
  };
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = make_stream(seed, r, 0, StreamRole::oracle);
    const auto xi = gibbs_rejection_sample(model, lambda, all, Context<D>(), law, window, alpha, rng);
    const auto c0 = inside(xi, cell);
    n0[r] = static_cast<double>(c0.size());
    e0[r] = e(c0) ? 1.0 : 0.0;
    for(std::size_t k = 0; k < shifted.size(); ++k) {
      const auto ck = inside(xi, shifted[k]);
      ns[k][r] = static_cast<double>(ck.size());
      fs[k][r] = f(ck) ? 1.0 : 0.0;
    }
  });
  auto covariance = [&](const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(reps);
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    RunningStats prod;
    for(std::size_t i = 0; i < reps; ++i) {
      prod.add((x[i] - mx) * (y[i] - my));
    }
    return std::pair<double, double>{prod.mean() * n / (n - 1), prod.standard_error()};
  };
  CorrelationReport report{};
  std::vector<DecayRow> table;
  for(std::size_t k = 0; k < separations.size(); ++k) {
    const auto [ce, se_e] = covariance(e0, fs[k]);
    const auto [cn, se_n] = covariance(n0, ns[k]);
    report.rows.push_back({separations[k], ce, se_e, cn / (volume * volume), se_n / (volume * volume)});
    table.push_back({separations[k], std::abs(cn) / (volume * volume), se_n / (volume * volume)});
  }
  report.fitted = false;
  if(table.size() >= 4 &&
     std::all_of(table.begin(), table.end(), [](const DecayRow& row) { return row.probability > 0; })) {
    report.fit = fit_decay(table);
    report.fitted = true;
  }
  return report;
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_DIAGNOSTICS_HPP
