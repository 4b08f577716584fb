#ifndef INCLUDE_GIBBSDP_POISSON_HPP
#define INCLUDE_GIBBSDP_POISSON_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "order.hpp"
#include "radius_law.hpp"
#include "rng.hpp"
#include "space.hpp"

namespace gibbsdp {

/// Floors a radius onto the W-bit grid (the key cell that contains it).
inline std::int64_t quantize_radius(double r, int frac_bits) {
  const double scaled = std::floor(r * kScale);
  if(!(scaled >= 0 && scaled < static_cast<double>(kMaxRaw))) {
    throw std::out_of_range("radius out of representable range");
  }
  return floor_to_grid(static_cast<std::int64_t>(scaled), frac_bits);
}

template<int D>
inline void check_law_fits(const RadiusLaw& law, const Window<D>& window) {
  if(std::abs(law.cdf(window.r_max()) - 1.0) > 1e-12) {
    throw std::invalid_argument("radius law " + law.describe() + " is not supported on [0, r_max]; truncate it first");
  }
}

/// One point uniform on Lambda (on the W-bit grid) with a Q-distributed radius.
template<int D, typename Generator>
inline Point<D> sample_uniform_point(const Window<D>& window, const RadiusLaw& law, Generator& rng) {
  const int shift = kFracBits - window.frac_bits();
  Point<D> p;
  for(int i = 0; i < D; ++i) {
    std::uniform_int_distribution<std::int64_t> cell(0, window.cells(i) - 1);
    p.center[i] = window.lo()[i] + (cell(rng) << shift);
  }
  p.radius = std::min(quantize_radius(law.sample(rng), window.frac_bits()), window.r_max_raw());
  return p;
}

/// Poisson(alpha L x Q) on Delta. Points come out in generation order.
template<int D, typename Generator>
inline Configuration<D> sample_poisson(const Window<D>& window, double alpha, const RadiusLaw& law, Generator& rng) {
  if(!(alpha >= 0)) {
    throw std::invalid_argument("sample_poisson: alpha must be nonnegative");
  }
  if(alpha == 0) {
    return {};
  }
  check_law_fits(law, window);
  std::poisson_distribution<long> count(alpha * window.volume());
  const long n = count(rng);
  std::vector<Point<D>> points;
  points.reserve(static_cast<std::size_t>(n));
  std::set<Point<D>> seen;
  while(static_cast<long>(points.size()) < n) {
    const Point<D> p = sample_uniform_point(window, law, rng);
    // A repeated key cell is resampled so the configuration stays simple.
    if(seen.insert(p).second) {
      points.push_back(p);
    }
  }
  return Configuration<D>::from_unique(std::move(points));
}

/// Membership test for an order interval intersected with a region.
template<int D>
class DomainFilter {
 public:
  DomainFilter(const OrderInterval<D>& domain, const Window<D>& window)
      : domain_(&domain), window_(&window), check_lo_(!domain.lo.is_zero()), check_hi_(domain.hi.has_value()) {}

  bool contains(const Point<D>& p) const {
    if(!window_->contains(p)) {
      return false;
    }
    if(check_lo_ || check_hi_) {
      const OrderKey k = encode(p, *window_);
      if(check_lo_ && k < domain_->lo) {
        return false;
      }
      if(check_hi_ && !(k < *domain_->hi)) {
        return false;
      }
    }
    return domain_->region.contains(p);
  }

 private:
  const OrderInterval<D>* domain_;
  const Window<D>* window_;
  bool check_lo_;
  bool check_hi_;
};

/// Poisson restricted to a domain: a window draw filtered by membership.
template<int D, typename Generator>
inline Configuration<D> sample_poisson_on(const OrderInterval<D>& domain, const Window<D>& window, double alpha,
                                          const RadiusLaw& law, Generator& rng) {
  Configuration<D> all = sample_poisson(window, alpha, law, rng);
  if(domain.lo.is_zero() && !domain.hi && domain.region.is_full()) {
    return all;
  }
  DomainFilter<D> filter(domain, window);
  std::vector<Point<D>> kept;
  for(const auto& p: all) {
    if(filter.contains(p)) {
      kept.push_back(p);
    }
  }
  return Configuration<D>::from_unique(std::move(kept));
}

template<int D>
inline OrderInterval<D> full_domain() {
  return {};
}

/// Points of omega lying in the domain.
template<int D>
inline Configuration<D> restrict_to(const Configuration<D>& omega, const OrderInterval<D>& domain,
                                    const Window<D>& window) {
  DomainFilter<D> filter(domain, window);
  std::vector<Point<D>> kept;
  for(const auto& p: omega) {
    if(filter.contains(p)) {
      kept.push_back(p);
    }
  }
  return Configuration<D>::from_unique(std::move(kept));
}

/// Points of omega whose centers lie in the closed box [lo, hi].
template<int D>
inline Configuration<D> restrict_to_box(const Configuration<D>& omega, const BoxProbe<D>& box) {
  std::vector<Point<D>> kept;
  for(const auto& p: omega) {
    bool inside = true;
    for(int i = 0; i < D; ++i) {
      inside = inside && p.center[i] >= box.lo[i] && p.center[i] <= box.hi[i];
    }
    if(inside) {
      kept.push_back(p);
    }
  }
  return Configuration<D>::from_unique(std::move(kept));
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_POISSON_HPP
