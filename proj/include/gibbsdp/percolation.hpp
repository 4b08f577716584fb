#ifndef INCLUDE_GIBBSDP_PERCOLATION_HPP
#define INCLUDE_GIBBSDP_PERCOLATION_HPP

// Boolean-model connection probabilities, a box-crossing threshold
// estimate, exponential decay fits and the radius-control event.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"
#include "poisson.hpp"
#include "radius_law.hpp"
#include "rng.hpp"
#include "space.hpp"
#include "stats.hpp"

namespace gibbsdp {

struct ProbabilityEstimate {
  double p;
  double se;
  std::size_t reps;
};

inline ProbabilityEstimate binomial_estimate(std::size_t hits, std::size_t reps) {
  if(reps == 0) {
    throw std::invalid_argument("estimate needs at least one replicate");
  }
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  return {p, std::sqrt(p * (1 - p) / static_cast<double>(reps)), reps};
}

/// Fraction of Poisson(alpha, Q) draws in which source and target connect.
template<int D, typename Generator>
ProbabilityEstimate connection_probability(double alpha, const RadiusLaw& law, const Window<D>& window,
                                           const Probe<D>& source, const Probe<D>& target, std::size_t reps,
                                           Generator& rng) {
  std::size_t hits = 0;
  for(std::size_t r = 0; r < reps; ++r) {
    const auto omega = sample_poisson(window, alpha, law, rng);
    hits += connected(omega, source, target) ? 1 : 0;
  }
  return binomial_estimate(hits, reps);
}

/// A Poisson draw at alpha_max with independent uniform marks; the points
/// with mark below alpha / alpha_max form a Poisson(alpha) draw, nested in alpha.
template<int D>
struct MarkedSample {
  std::vector<Point<D>> points;
  std::vector<double> marks;
  double alpha_max{0.0};

  Configuration<D> at(double alpha) const {
    std::vector<Point<D>> kept;
    const double cut = alpha_max > 0 ? alpha / alpha_max : 0.0;
    for(std::size_t i = 0; i < points.size(); ++i) {
      if(marks[i] < cut) {
        kept.push_back(points[i]);
      }
    }
    return Configuration<D>::from_unique(std::move(kept));
  }
};

template<int D, typename Generator>
MarkedSample<D> sample_marked(const Window<D>& window, double alpha_max, const RadiusLaw& law, Generator& rng) {
  MarkedSample<D> s;
  s.alpha_max = alpha_max;
  const auto omega = sample_poisson(window, alpha_max, law, rng);
  for(const auto& p: omega) {
    s.points.push_back(p);
    s.marks.push_back(uniform01(rng));
  }
  return s;
}

/// For each distance n, whether the origin probe connects to the complement
/// of B(0, n).
template<int D>
std::vector<bool> origin_reaches(const Configuration<D>& omega, const std::vector<double>& distances) {
  std::vector<bool> out(distances.size(), false);
  const auto pts = omega.span();
  const Probe<D> origin = BallProbe<D>{Point<D>{}};
  auto dsu = gilbert_components<D>(pts);
  std::vector<char> reached(pts.size(), 0);
  for(std::size_t i = 0; i < pts.size(); ++i) {
    if(touches(origin, pts[i])) {
      reached[dsu.find(i)] = 1;
    }
  }
  for(std::size_t k = 0; k < distances.size(); ++k) {
    const Probe<D> ring = ExteriorProbe<D>::from_double({}, distances[k]);
    if(probes_touch(origin, ring)) {
      out[k] = true;
      continue;
    }
    for(std::size_t i = 0; i < pts.size() && !out[k]; ++i) {
      out[k] = reached[dsu.find(i)] && touches(ring, pts[i]);
    }
  }
  return out;
}

struct SweepRow {
  double alpha;
  double distance;
  double p;
  double se;
  std::size_t reps;
};

/// Origin-to-sphere connection probabilities on shared draws: one marked
/// sample per replicate serves every (alpha, distance) cell.
template<int D>
std::vector<SweepRow> connection_sweep(const std::vector<double>& alphas, const std::vector<double>& distances,
                                       const RadiusLaw& law, std::size_t reps, std::uint64_t seed,
                                       int frac_bits = 32, int threads = 1) {
  if(alphas.empty() || distances.empty()) {
    throw std::invalid_argument("connection_sweep: empty grid");
  }
  const double a_max = *std::max_element(alphas.begin(), alphas.end());
  const double n_max = *std::max_element(distances.begin(), distances.end());
  const double half = n_max + law.support_max();
  std::array<double, D> lo{}, hi{};
  lo.fill(-half);
  hi.fill(half);
  const Window<D> window(lo, hi, law.support_max(), frac_bits);
  const std::size_t cells = alphas.size() * distances.size();
  std::vector<char> reached(reps * cells, 0);
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = make_stream(seed, r, 0, StreamRole::poisson);
    const auto marked = sample_marked(window, a_max, law, rng);
    for(std::size_t a = 0; a < alphas.size(); ++a) {
      const auto reach = origin_reaches(marked.at(alphas[a]), distances);
      for(std::size_t k = 0; k < distances.size(); ++k) {
        reached[r * cells + a * distances.size() + k] = reach[k] ? 1 : 0;
      }
    }
  });
  std::vector<std::size_t> hits(cells, 0);
  for(std::size_t r = 0; r < reps; ++r) {
    for(std::size_t c = 0; c < cells; ++c) {
      hits[c] += static_cast<std::size_t>(reached[r * cells + c]);
    }
  }
  std::vector<SweepRow> rows;
  for(std::size_t a = 0; a < alphas.size(); ++a) {
    for(std::size_t k = 0; k < distances.size(); ++k) {
      const auto est = binomial_estimate(hits[a * distances.size() + k], reps);
      rows.push_back({alphas[a], distances[k], est.p, est.se, reps});
    }
  }
  return rows;
}

/// Probability that the Boolean model in [0, L]^D joins the faces x_0 = 0
/// and x_0 = L. Replicate r thins the same marked draw at alpha_max, so the
/// curve is monotone in alpha.
template<int D>
double crossing_probability(double alpha, double alpha_max, double side, const RadiusLaw& law, std::size_t reps,
                            std::uint64_t seed, int frac_bits = 16) {
  std::array<double, D> lo{}, hi{};
  hi.fill(side);
  const Window<D> window(lo, hi, law.support_max(), frac_bits);
  std::array<double, D> face_hi = hi;
  face_hi[0] = 0.0;
  std::array<double, D> far_lo{};
  far_lo[0] = side;
  const Probe<D> left = BoxProbe<D>::from_double(lo, face_hi);
  const Probe<D> right = BoxProbe<D>::from_double(far_lo, hi);
  const auto size_tag = static_cast<std::uint64_t>(std::llround(side * 1024));
  std::size_t hits = 0;
  for(std::size_t r = 0; r < reps; ++r) {
    Rng rng = make_stream(seed, r, size_tag, StreamRole::poisson);
    const auto marked = sample_marked(window, alpha_max, law, rng);
    hits += connected(marked.at(alpha), left, right) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(reps);
}

struct ThresholdEstimate {
  double alpha_c;
  double ci_low;
  double ci_high;
  std::vector<double> batch_estimates;
};

/// Crossing point of the box-crossing curves of two box sizes, located by
/// bisection in each of `batches` independent seed batches; the interval is
/// a percentile bootstrap of the batch mean.
template<int D>
ThresholdEstimate estimate_threshold(const RadiusLaw& law, double small_side, double large_side, double alpha_lo,
                                     double alpha_hi, std::size_t reps, std::size_t batches, std::uint64_t seed,
                                     int iterations = 10, std::size_t bootstrap = 2000) {
  if constexpr(D < 2) {
    throw std::invalid_argument("estimate_threshold: no finite threshold in dimension one");
  }
  if(!law.rho_moment(D).finite) {
    throw std::invalid_argument("estimate_threshold: radius law has infinite d-th moment");
  }
  if(!(small_side < large_side) || !(alpha_lo < alpha_hi) || batches == 0) {
    throw std::invalid_argument("estimate_threshold: bad geometry or bracket");
  }
  ThresholdEstimate est{};
  for(std::size_t b = 0; b < batches; ++b) {
    const std::uint64_t bseed = derive_seed(seed, b, 0, StreamRole::aux);
    auto gap = [&](double alpha) {
      return crossing_probability<D>(alpha, alpha_hi, large_side, law, reps, bseed) -
             crossing_probability<D>(alpha, alpha_hi, small_side, law, reps, bseed);
    };
    double lo = alpha_lo;
    double hi = alpha_hi;
    if(!(gap(lo) < 0 && gap(hi) > 0)) {
      throw std::runtime_error("estimate_threshold: crossing curves do not cross in the bracket (window too small?)");
    }
    for(int it = 0; it < iterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) < 0 ? lo : hi) = mid;
    }
    est.batch_estimates.push_back(0.5 * (lo + hi));
  }
  const auto& xs = est.batch_estimates;
  est.alpha_c = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  Rng rng(derive_seed(seed, 0, 1, StreamRole::aux));
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::vector<double> means;
  for(std::size_t s = 0; s < bootstrap; ++s) {
    double m = 0.0;
    for(std::size_t i = 0; i < xs.size(); ++i) {
      m += xs[pick(rng)];
    }
    means.push_back(m / static_cast<double>(xs.size()));
  }
  std::sort(means.begin(), means.end());
  est.ci_low = means[static_cast<std::size_t>(0.025 * static_cast<double>(means.size()))];
  est.ci_high = means[std::min(means.size() - 1, static_cast<std::size_t>(0.975 * static_cast<double>(means.size())))];
  return est;
}

struct DecayRow {
  double distance;
  double probability;
  double se;
};

struct DecayFit {
  double kappa;
  double K;
  double r_squared;
  std::vector<DecayRow> rows;
};

/// Weighted least squares of log p = log K - kappa * distance. Weights are
/// (p / se)^2, or uniform when any se is zero.
inline DecayFit fit_decay(const std::vector<DecayRow>& rows) {
  if(rows.size() < 4) {
    throw std::invalid_argument("fit_decay: needs at least 4 distances");
  }
  bool weighted = true;
  for(std::size_t i = 0; i < rows.size(); ++i) {
    if(!(rows[i].probability > 0)) {
      throw std::invalid_argument("fit_decay: nonpositive probability in table");
    }
    if(i > 0 && !(rows[i].distance > rows[i - 1].distance)) {
      throw std::invalid_argument("fit_decay: distances must be strictly increasing");
    }
    weighted = weighted && rows[i].se > 0;
  }
  double sw = 0, sx = 0, sy = 0;
  std::vector<double> w(rows.size()), y(rows.size());
  for(std::size_t i = 0; i < rows.size(); ++i) {
    w[i] = weighted ? std::pow(rows[i].probability / rows[i].se, 2) : 1.0;
    y[i] = std::log(rows[i].probability);
    sw += w[i];
    sx += w[i] * rows[i].distance;
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for(std::size_t i = 0; i < rows.size(); ++i) {
    const double dx = rows[i].distance - mx;
    const double dy = y[i] - my;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * dy;
    syy += w[i] * dy * dy;
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0;
  for(std::size_t i = 0; i < rows.size(); ++i) {
    const double res = y[i] - (intercept + slope * rows[i].distance);
    ss_res += w[i] * res * res;
  }
  const double r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return {-slope, std::exp(intercept), r2, rows};
}

/// Every ball satisfies r <= |x| / 2 + k (exact integer test).
template<int D>
bool upsilon_holds(const Configuration<D>& omega, double k) {
  const std::int64_t kraw = to_raw(k);
  for(const auto& p: omega) {
    const i128 excess = static_cast<i128>(p.radius) - kraw;
    if(excess <= 0) {
      continue;
    }
    const i128 norm2 = squared_distance_raw<D>(p.center, std::array<std::int64_t, D>{});
    if(4 * excess * excess > norm2) {
      return false;
    }
  }
  return true;
}

struct FindKResult {
  double k;
  double p_hat;
  double se;
  bool reached;
};

/// Smallest k with empirical P(Upsilon_k) >= 1 - eps: the matching order
/// statistic of the per-sample minimal k.
template<int D, typename Generator>
FindKResult find_k(double alpha, const RadiusLaw& law, const Window<D>& window, double eps, std::size_t reps,
                   Generator& rng, double k_max = 1e6) {
  if(!law.rho_moment(D).finite) {
    throw std::invalid_argument("find_k: radius law has infinite d-th moment");
  }
  if(reps == 0 || !(eps >= 0 && eps <= 1)) {
    throw std::invalid_argument("find_k: bad arguments");
  }
  std::vector<Configuration<D>> samples;
  std::vector<double> kmin;
  for(std::size_t r = 0; r < reps; ++r) {
    samples.push_back(sample_poisson(window, alpha, law, rng));
    double m = 0.0;
    for(const auto& p: samples.back()) {
      double norm = 0.0;
      for(int i = 0; i < D; ++i) {
        norm += p.x(i) * p.x(i);
      }
      m = std::max(m, p.r() - 0.5 * std::sqrt(norm));
    }
    kmin.push_back(m);
  }
  std::vector<double> sorted = kmin;
  std::sort(sorted.begin(), sorted.end());
  const auto need = static_cast<std::size_t>(std::ceil((1.0 - eps) * static_cast<double>(reps) - 1e-9));
  double k = need == 0 ? 0.0 : sorted[need - 1];
  // Round up to the raw grid so the exact test agrees with the double estimate.
  k = to_double(to_raw(k) + 1);
  if(need == 0) {
    k = 0.0;
  }
  std::size_t hits = 0;
  for(const auto& s: samples) {
    hits += upsilon_holds(s, k) ? 1 : 0;
  }
  const auto est = binomial_estimate(hits, reps);
  return {k, est.p, est.se, k <= k_max && est.p >= 1 - eps};
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_PERCOLATION_HPP
