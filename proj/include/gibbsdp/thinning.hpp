#ifndef INCLUDE_GIBBSDP_THINNING_HPP
#define INCLUDE_GIBBSDP_THINNING_HPP

// Sequential dependent thinning of Poisson(alpha) into the Gibbs specification.
//
// Points are visited in increasing key order. Given the points kept so far,
// X is kept with probability
//   p^s = (lambda/alpha) e^{-H_X(X|gamma u kept)} Z(]X,oo[, gamma u kept u X) / Z([X,oo[, gamma u kept)
//       = E[(lambda/alpha) e^{-H_X(X | gamma u kept u xi)}],  xi ~ specification on ]X,oo[ with gamma u kept.
// The exact rule draws xi by rejection and flips one coin with the inner
// probability; the estimated rule evaluates the Z ratio by Monte Carlo.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "models.hpp"
#include "order.hpp"
#include "partition.hpp"
#include "poisson.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace gibbsdp {

enum class KeepRule { exact_factory, estimated };

struct ThinningOptions {
  KeepRule rule{KeepRule::exact_factory};
  std::size_t z_samples{20000};
  double bias_budget{0.05};
  double clamp_sigmas{4.0};
};

template<typename Model, int D>
struct ThinningKernel {
  Model model;
  double lambda{0.0};
  double alpha{0.0};
  RadiusLaw law;
  Window<D> window;
  OrderInterval<D> domain{};
  Configuration<D> gamma{};

  /// Uses alpha = dom_level(model, lambda) unless an explicit larger alpha is given.
  static ThinningKernel make(Model model, double lambda, RadiusLaw law, Window<D> window,
                             OrderInterval<D> domain = {}, Configuration<D> gamma = {},
                             std::optional<double> alpha = std::nullopt) {
    const double level = dom_level(model, lambda);
    const double a = alpha.value_or(level);
    if(a < level * (1 - 1e-12)) {
      throw DomViolation("thinning kernel: alpha below the domination level");
    }
    check_law_fits(law, window);
    for(const auto& y: gamma) {
      if(window.contains_center(y.center) && DomainFilter<D>(domain, window).contains(y)) {
        throw std::invalid_argument("thinning kernel: gamma meets the domain");
      }
    }
    return ThinningKernel{std::move(model), lambda, a, std::move(law), std::move(window), std::move(domain),
                          std::move(gamma)};
  }

  /// ]X, oo[ intersected with the domain.
  OrderInterval<D> future_of(const Point<D>& x) const {
    OrderInterval<D> f = domain;
    f.lo = encode(x, window).next();
    return f;
  }
};

struct ProbEstimate {
  double value;
  double std_error;
};

/// Monte-Carlo evaluation of p^s through the ratio of partition functions.
/// Both partition functions use the same Poisson(lambda) draws on ]X, oo[:
///   p^s = (lambda/alpha) E[w(omega u X)] / E[w(omega)],  w = e^{-H(. | gamma u kept)}.
template<typename Model, int D>
class SinglePointEstimator {
 public:
  SinglePointEstimator(const ThinningKernel<Model, D>& kernel, std::size_t samples, double clamp_sigmas = 4.0)
      : kernel_(&kernel), samples_(samples), clamp_sigmas_(clamp_sigmas) {}

  template<typename Generator>
  ProbEstimate operator()(const Point<D>& x, const Configuration<D>& kept, Generator& rng) {
    const OrderKey kx = encode(x, kernel_->window);
    for(const auto& k: kept) {
      if(!(encode(k, kernel_->window) < kx)) {
        throw std::invalid_argument("single_point_prob: kept must precede X in the order");
      }
    }
    if(!DomainFilter<D>(kernel_->domain, kernel_->window).contains(x)) {
      throw std::invalid_argument("single_point_prob: X outside the domain");
    }
    const auto cache_key = std::make_pair(kx, hash(kept));
    if(const auto it = cache_.find(cache_key); it != cache_.end()) {
      return it->second;
    }
    const Context<D> ctx(merge(kernel_->gamma, kept), kernel_->window);
    const double ratio = kernel_->lambda / kernel_->alpha;
    const double wx = boltzmann(kernel_->model, std::span<const Point<D>>(&x, 1), ctx);
    ProbEstimate out{0.0, 0.0};
    if(wx > 0) {
      const auto future = kernel_->future_of(x);
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      std::vector<Point<D>> buf;
      for(std::size_t s = 0; s < samples_; ++s) {
        const auto omega = sample_poisson_on(future, kernel_->window, kernel_->lambda, kernel_->law, rng);
        buf.assign(omega.begin(), omega.end());
        const double b = boltzmann(kernel_->model, std::span<const Point<D>>(buf), ctx);
        buf.push_back(x);
        const double a = boltzmann(kernel_->model, std::span<const Point<D>>(buf), ctx);
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
      }
      const double n = static_cast<double>(samples_);
      const double ma = sa / n;
      const double mb = sb / n;
      const double va = saa / n - ma * ma;
      const double vb = sbb / n - mb * mb;
      const double cab = sab / n - ma * mb;
      const double se_b = std::sqrt(std::max(0.0, vb) / n);
      if(!(mb > se_b)) {
        throw std::runtime_error("single_point_prob: partition function estimate below its error");
      }
      const double r = ma / mb;
      const double var_r = std::max(0.0, va - 2 * r * cab + r * r * vb) / (n * mb * mb);
      out = {ratio * r, ratio * std::sqrt(var_r)};
    }
    if(out.value > 1) {
      if(out.value - 1 > clamp_sigmas_ * out.std_error + 1e-12) {
        throw std::runtime_error("single_point_prob: estimate above 1 beyond its error");
      }
      out.value = 1.0;
    }
    cache_.emplace(cache_key, out);
    return out;
  }

 private:
  static std::size_t hash(const Configuration<D>& kept) {
    std::uint64_t h = kept.size();
    std::vector<Point<D>> sorted(kept.begin(), kept.end());
    std::sort(sorted.begin(), sorted.end());
    for(const auto& p: sorted) {
      for(int i = 0; i < D; ++i) {
        h = splitmix64(h ^ static_cast<std::uint64_t>(p.center[i]));
      }
      h = splitmix64(h ^ static_cast<std::uint64_t>(p.radius));
    }
    return static_cast<std::size_t>(h);
  }

  const ThinningKernel<Model, D>* kernel_;
  std::size_t samples_;
  double clamp_sigmas_;
  std::map<std::pair<OrderKey, std::size_t>, ProbEstimate> cache_;
};

template<typename Model, int D, typename Generator>
ProbEstimate single_point_prob(const ThinningKernel<Model, D>& kernel, const Point<D>& x,
                               const Configuration<D>& kept, Generator& rng, std::size_t samples = 20000) {
  SinglePointEstimator<Model, D> est(kernel, samples);
  return est(x, kept, rng);
}

/// One exact keep/drop decision for X given the kept points.
template<typename Model, int D, typename Generator>
bool exact_keep(const ThinningKernel<Model, D>& kernel, const Point<D>& x, const Context<D>& ctx, Generator& rng) {
  const double ratio = kernel.lambda / kernel.alpha;
  const double wx = boltzmann(kernel.model, std::span<const Point<D>>(&x, 1), ctx);
  if(wx == 0) {
    return false;
  }
  const auto future = kernel.future_of(x);
  const auto xi = gibbs_rejection_sample(kernel.model, kernel.lambda, future, ctx, kernel.law, kernel.window,
                                         kernel.alpha, rng);
  std::vector<Point<D>> buf(xi.begin(), xi.end());
  const double w_xi = boltzmann(kernel.model, std::span<const Point<D>>(buf), ctx);
  buf.push_back(x);
  const double w_both = boltzmann(kernel.model, std::span<const Point<D>>(buf), ctx);
  // e^{-H_X(X | gamma u kept u xi)} by additivity.
  const double p = ratio * w_both / w_xi;
  if(p > 1 + 1e-9) {
    throw DomViolation("thinning: keep probability above 1");
  }
  return uniform01(rng) < p;
}

template<int D>
struct ThinResult {
  Configuration<D> kept;
  Configuration<D> poisson;
  double bias{0.0};
  bool flagged{false};
};

/// Thins a given Poisson configuration (restricted to the kernel domain).
template<typename Model, int D, typename Generator>
ThinResult<D> thin_configuration(const ThinningKernel<Model, D>& kernel, const Configuration<D>& poisson,
                                 Generator& rng, const ThinningOptions& options = {}) {
  ThinResult<D> out;
  out.poisson = poisson;
  if(poisson.empty()) {
    return out;
  }
  std::optional<SinglePointEstimator<Model, D>> estimator;
  if(options.rule == KeepRule::estimated) {
    estimator.emplace(kernel, options.z_samples, options.clamp_sigmas);
  }
  Context<D> ctx(kernel.gamma, kernel.window);
  for(const auto& x: sorted_by_order(poisson, kernel.window)) {
    bool keep = false;
    if(options.rule == KeepRule::exact_factory) {
      keep = exact_keep(kernel, x, ctx, rng);
    } else {
      const ProbEstimate p = (*estimator)(x, out.kept, rng);
      out.bias += p.std_error;
      keep = uniform01(rng) < p.value;
    }
    if(keep) {
      out.kept.insert(x);
      ctx = Context<D>(merge(kernel.gamma, out.kept), kernel.window);
    }
  }
  out.flagged = out.bias > options.bias_budget;
  return out;
}

/// Poisson(alpha) on the domain, thinned in key order.
template<typename Model, int D, typename Generator>
ThinResult<D> thin_sample(const ThinningKernel<Model, D>& kernel, Generator& rng, const ThinningOptions& options = {}) {
  if(kernel.alpha == 0) {
    return {};
  }
  const auto poisson = sample_poisson_on(kernel.domain, kernel.window, kernel.alpha, kernel.law, rng);
  return thin_configuration(kernel, poisson, rng, options);
}

struct LogDensity {
  double value;
  double std_error;
};

/// log p^j(kept | full).
template<typename Model, int D, typename Generator>
LogDensity joint_thin_logdensity(const ThinningKernel<Model, D>& kernel, const Configuration<D>& kept,
                                 const Configuration<D>& full, Generator& rng, std::size_t samples = 20000) {
  if(!kept.subset_of(full)) {
    return {-kInfinity, 0.0};
  }
  SinglePointEstimator<Model, D> est(kernel, samples);
  Configuration<D> before;
  double total = 0.0;
  double var = 0.0;
  for(const auto& z: sorted_by_order(full, kernel.window)) {
    const ProbEstimate p = est(z, before, rng);
    const bool in = kept.contains(z);
    const double q = in ? p.value : 1.0 - p.value;
    if(q <= 0) {
      return {-kInfinity, 0.0};
    }
    total += std::log(q);
    var += (p.std_error / q) * (p.std_error / q);
    if(in) {
      before.insert(z);
    }
  }
  return {total, std::sqrt(var)};
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_THINNING_HPP
