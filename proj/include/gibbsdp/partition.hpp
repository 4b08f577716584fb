#ifndef INCLUDE_GIBBSDP_PARTITION_HPP
#define INCLUDE_GIBBSDP_PARTITION_HPP

// Partition-function estimates and the exact rejection sampler for the
// finite-volume Gibbs specification.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "models.hpp"
#include "order.hpp"
#include "poisson.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace gibbsdp {

struct ZEstimate {
  double value{1.0};
  double truncation_error{0.0};
  double mc_error{0.0};
  int n_max{0};

  double total_error() const { return truncation_error + mc_error; }
};

inline double poisson_pmf(int n, double mean) {
  if(mean == 0) {
    return n == 0 ? 1.0 : 0.0;
  }
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

/// P(Poi(mean) > n).
inline double poisson_tail(int n, double mean) {
  if(mean == 0) {
    return 0.0;
  }
  return boost::math::cdf(boost::math::complement(boost::math::poisson_distribution<double>(mean), n));
}

/// Smallest n with e^{(alpha-lambda)M} P(Poi(alpha M) > n) below tol.
inline int default_n_max(double lambda, double alpha, double mass, double tol = 1e-6) {
  const double factor = std::exp((alpha - lambda) * mass);
  int n = 0;
  while(factor * poisson_tail(n, alpha * mass) > tol) {
    ++n;
  }
  return n;
}

/// Samples points iid from Q* restricted to a domain.
template<int D>
class DomainSampler {
 public:
  DomainSampler(const OrderInterval<D>& domain, const RadiusLaw& law, const Window<D>& window)
      : sampler_(domain.lo, domain.upper(window), law, window), region_(&domain.region) {}

  template<typename Generator>
  Point<D> operator()(Generator& rng, std::size_t max_tries = 10'000'000) const {
    for(std::size_t t = 0; t < max_tries; ++t) {
      const Point<D> p = sampler_(rng);
      if(region_->contains(p)) {
        return p;
      }
    }
    throw std::runtime_error("DomainSampler: region membership too rare");
  }

  double interval_mass() const { return sampler_.mass(); }

 private:
  IntervalSampler<D> sampler_;
  const Region<D>* region_;
};

/// Z(lambda, D, gamma) by stratified quadrature over the number of points.
/// Stratum n averages e^{-H} over n iid Q*-uniform points of D.
template<typename Model, int D, typename Generator>
ZEstimate z_bruteforce(const Model& model, double lambda, const OrderInterval<D>& domain, const Configuration<D>& gamma,
                       const RadiusLaw& law, const Window<D>& window, int n_max, std::size_t quad_budget,
                       Generator& rng, double tolerance = kInfinity) {
  const double alpha = dom_level(model, lambda);
  const MeasureEstimate mass = interval_measure(domain, law, window, rng);
  ZEstimate z;
  z.n_max = n_max;
  if(mass.value <= 0 || lambda == 0) {
    return z;
  }
  const double lm = lambda * mass.value;
  z.truncation_error = std::exp((alpha - lambda) * mass.value) * poisson_tail(n_max, alpha * mass.value);
  if(z.truncation_error > tolerance) {
    throw std::invalid_argument("z_bruteforce: n_max too small for the requested tolerance");
  }
  const Context<D> ctx(gamma, window);
  const DomainSampler<D> sampler(domain, law, window);
  const std::size_t per = std::max<std::size_t>(1, quad_budget / std::max(1, n_max));
  std::vector<double> means(static_cast<std::size_t>(n_max) + 1, 1.0);
  double value = poisson_pmf(0, lm);
  double var = 0.0;
  std::vector<Point<D>> pts;
  for(int n = 1; n <= n_max; ++n) {
    const double bound = std::pow(alpha / lambda, n) * (1 + 1e-9);
    RunningStats acc;
    for(std::size_t s = 0; s < per; ++s) {
      pts.clear();
      for(int k = 0; k < n; ++k) {
        pts.push_back(sampler(rng));
      }
      const double w = boltzmann(model, std::span<const Point<D>>(pts), ctx);
      if(w > bound) {
        throw DomViolation("z_bruteforce: Boltzmann weight exceeds the (Dom) bound");
      }
      acc.add(w);
    }
    const double pn = poisson_pmf(n, lm);
    means[static_cast<std::size_t>(n)] = acc.mean();
    value += pn * acc.mean();
    var += pn * pn * acc.variance() / static_cast<double>(per);
  }
  // Uncertainty of a Monte-Carlo domain mass, by the derivative in M.
  if(mass.std_error > 0) {
    double dz = -lambda * poisson_pmf(0, lm);
    for(int n = 1; n <= n_max; ++n) {
      dz += lambda * (poisson_pmf(n - 1, lm) - poisson_pmf(n, lm)) * means[static_cast<std::size_t>(n)];
    }
    var += dz * dz * mass.std_error * mass.std_error;
  }
  z.value = value;
  z.mc_error = std::sqrt(var);
  return z;
}

struct RejectionStats {
  std::size_t attempts{0};
  std::size_t accepted{0};
};

/// Exact sample of the Gibbs specification on D with boundary gamma: Poisson(alpha)
/// proposals accepted with probability (lambda/alpha)^n e^{-H}.
template<typename Model, int D, typename Generator>
Configuration<D> gibbs_rejection_sample(const Model& model, double lambda, const OrderInterval<D>& domain,
                                        const Context<D>& ctx, const RadiusLaw& law, const Window<D>& window,
                                        double alpha, Generator& rng, RejectionStats* stats = nullptr,
                                        std::size_t max_attempts = 100'000'000) {
  if(lambda == 0) {
    if(stats) {
      ++stats->attempts;
      ++stats->accepted;
    }
    return {};
  }
  const double ratio = lambda / alpha;
  if(!(ratio <= 1 + 1e-12)) {
    throw DomViolation("gibbs_rejection_sample: alpha below lambda");
  }
  for(std::size_t a = 0; a < max_attempts; ++a) {
    Configuration<D> omega = sample_poisson_on(domain, window, alpha, law, rng);
    const double w = boltzmann(model, omega.span(), ctx);
    const double accept = std::pow(ratio, static_cast<double>(omega.size())) * w;
    if(accept > 1 + 1e-9) {
      throw DomViolation("gibbs_rejection_sample: acceptance ratio above 1");
    }
    if(stats) {
      ++stats->attempts;
    }
    if(accept >= 1 || uniform01(rng) < accept) {
      if(stats) {
        ++stats->accepted;
      }
      return omega;
    }
  }
  throw std::runtime_error("gibbs_rejection_sample: attempt budget exhausted");
}

template<typename Model, int D, typename Generator>
Configuration<D> gibbs_rejection_sample(const Model& model, double lambda, const OrderInterval<D>& domain,
                                        const Configuration<D>& gamma, const RadiusLaw& law, const Window<D>& window,
                                        Generator& rng, RejectionStats* stats = nullptr) {
  return gibbs_rejection_sample(model, lambda, domain, Context<D>(gamma, window), law, window,
                                dom_level(model, lambda), rng, stats);
}

/// Z from the acceptance rate: P(accept) = e^{(lambda - alpha) M} Z.
inline ValueWithError z_from_acceptance(const RejectionStats& stats, double lambda, double alpha, double mass) {
  if(stats.attempts == 0) {
    throw std::invalid_argument("z_from_acceptance: no attempts");
  }
  const double n = static_cast<double>(stats.attempts);
  const double rate = static_cast<double>(stats.accepted) / n;
  const double factor = std::exp((alpha - lambda) * mass);
  return {rate * factor, factor * std::sqrt(rate * (1 - rate) / n)};
}

/// Z(lambda, D, gamma) = E_{Poisson(lambda) on D}[e^{-H}]; plain Monte Carlo
/// used by the estimated thinning probabilities.
template<typename Model, int D, typename Generator>
ValueWithError z_direct(const Model& model, double lambda, const OrderInterval<D>& domain, const Context<D>& ctx,
                        const RadiusLaw& law, const Window<D>& window, std::size_t samples, Generator& rng) {
  RunningStats acc;
  for(std::size_t s = 0; s < samples; ++s) {
    const auto omega = sample_poisson_on(domain, window, lambda, law, rng);
    acc.add(boltzmann(model, omega.span(), ctx));
  }
  return {acc.mean(), acc.standard_error()};
}

struct DlrReport {
  double count_p_value;
  double component_p_value;
  std::size_t reps;
  bool passed;
};

/// Compares xi restricted to a sub-window (from whole-window samples) with a
/// direct specification sample on the sub-window given the outside points.
template<typename Model, int D, typename Generator>
DlrReport dlr_check(const Model& model, double lambda, const Window<D>& window, const Window<D>& sub,
                    const RadiusLaw& law, std::size_t reps, Generator& rng, double level = 0.01) {
  if(sub.frac_bits() != window.frac_bits()) {
    throw std::invalid_argument("dlr_check: sub-window must share the grid");
  }
  for(int i = 0; i < D; ++i) {
    if(sub.lo()[i] < window.lo()[i] || sub.hi()[i] > window.hi()[i]) {
      throw std::invalid_argument("dlr_check: sub-window not inside the window");
    }
  }
  const OrderInterval<D> all{};
  const double alpha = dom_level(model, lambda);
  std::vector<long> count_a, count_b, comp_a, comp_b;
  for(std::size_t r = 0; r < reps; ++r) {
    const auto xi = gibbs_rejection_sample(model, lambda, all, Context<D>(), law, window, alpha, rng);
    Configuration<D> inside, outside;
    for(const auto& p: xi) {
      if(sub.contains_center(p.center)) {
        inside.insert(p);
      } else {
        outside.insert(p);
      }
    }
    const auto direct =
        gibbs_rejection_sample(model, lambda, all, Context<D>(outside, sub), law, sub, alpha, rng);
    count_a.push_back(static_cast<long>(inside.size()));
    count_b.push_back(static_cast<long>(direct.size()));
    comp_a.push_back(static_cast<long>(count_components<D>(inside.span())));
    comp_b.push_back(static_cast<long>(count_components<D>(direct.span())));
  }
  DlrReport report{};
  report.reps = reps;
  report.count_p_value = chi_square_two_sample(count_a, count_b).p_value;
  report.component_p_value = chi_square_two_sample(comp_a, comp_b).p_value;
  report.passed = report.count_p_value > level && report.component_p_value > level;
  return report;
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_PARTITION_HPP
