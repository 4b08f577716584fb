#ifndef INCLUDE_GIBBSDP_RADIUS_LAW_HPP
#define INCLUDE_GIBBSDP_RADIUS_LAW_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gibbsdp {

/// The radius measure Q on [0, inf).
///
/// Supported kinds: an atom delta(R), uniform(r0, r1), a piecewise-linear
/// tabulated CDF, and two unbounded families (exponential, Pareto) that must be
/// truncated before they can be simulated. Truncation renormalises the law on
/// [0, t] and records the discarded tail mass.
class RadiusLaw {
 public:
  enum class Kind { delta, uniform, tabulated, exponential, pareto };

  static RadiusLaw delta(double radius) {
    if(!(radius >= 0)) {
      throw std::invalid_argument("delta radius must be nonnegative");
    }
    RadiusLaw law(Kind::delta);
    law.a_ = radius;
    return law;
  }

  static RadiusLaw uniform(double r0, double r1) {
    if(!(r0 >= 0 && r1 > r0)) {
      throw std::invalid_argument("uniform radius law needs 0 <= r0 < r1");
    }
    RadiusLaw law(Kind::uniform);
    law.a_ = r0;
    law.b_ = r1;
    return law;
  }

  // Knots strictly increasing from knots[0] >= 0; cdf nondecreasing from 0 to 1.
  static RadiusLaw tabulated(std::vector<double> knots, std::vector<double> cdf) {
    if(knots.size() < 2 || knots.size() != cdf.size()) {
      throw std::invalid_argument("tabulated radius law needs >= 2 matching knots and cdf values");
    }
    if(knots.front() < 0 || std::abs(cdf.front()) > 1e-12 || std::abs(cdf.back() - 1.0) > 1e-12) {
      throw std::invalid_argument("tabulated radius law must start at cdf 0 and end at cdf 1");
    }
    for(std::size_t i = 1; i < knots.size(); ++i) {
      if(!(knots[i] > knots[i - 1]) || cdf[i] < cdf[i - 1]) {
        throw std::invalid_argument("tabulated radius law must be increasing");
      }
    }
    cdf.front() = 0.0;
    cdf.back() = 1.0;
    RadiusLaw law(Kind::tabulated);
    law.knots_ = std::move(knots);
    law.cdf_ = std::move(cdf);
    return law;
  }

  static RadiusLaw exponential(double rate) {
    if(!(rate > 0)) {
      throw std::invalid_argument("exponential rate must be positive");
    }
    RadiusLaw law(Kind::exponential);
    law.a_ = rate;
    return law;
  }

  static RadiusLaw pareto(double shape, double scale) {
    if(!(shape > 0 && scale > 0)) {
      throw std::invalid_argument("pareto shape and scale must be positive");
    }
    RadiusLaw law(Kind::pareto);
    law.a_ = shape;
    law.b_ = scale;
    return law;
  }

  /// Conditions on [0, t]. Only meaningful for laws with mass above t.
  RadiusLaw truncated(double t) const {
    if(!(t > 0)) {
      throw std::invalid_argument("truncation point must be positive");
    }
    if(kind_ != Kind::exponential && kind_ != Kind::pareto) {
      if(support_max() > t) {
        throw std::invalid_argument("truncating a bounded law below its support is not supported");
      }
      return *this;
    }
    RadiusLaw law = *this;
    const double keep = base_cdf(t);
    if(!(keep > 0)) {
      throw std::invalid_argument("truncation discards all mass");
    }
    law.trunc_ = t;
    law.tail_mass_ = 1.0 - keep;
    return law;
  }

  Kind kind() const { return kind_; }
  double tail_mass() const { return tail_mass_; }
  bool is_bounded() const { return std::isfinite(support_max()); }
  bool is_atomic() const { return kind_ == Kind::delta; }
  double atom() const { return a_; }

  double support_max() const {
    switch(kind_) {
      case Kind::delta: return a_;
      case Kind::uniform: return b_;
      case Kind::tabulated: return knots_.back();
      default: return trunc_;
    }
  }

  /// Q([0, r]).
  double cdf(double r) const {
    if(r < 0) {
      return 0.0;
    }
    if(kind_ == Kind::delta) {
      return r >= a_ ? 1.0 : 0.0;
    }
    return continuous_cdf(r);
  }

  /// Q([lo, hi)).
  double mass(double lo, double hi) const {
    if(!(hi > lo)) {
      return 0.0;
    }
    if(kind_ == Kind::delta) {
      return (lo <= a_ && a_ < hi) ? 1.0 : 0.0;
    }
    return std::max(0.0, continuous_cdf(hi) - continuous_cdf(std::max(lo, 0.0)));
  }

  template<typename Generator>
  double sample(Generator& rng) const {
    if(kind_ == Kind::delta) {
      return a_;
    }
    if(!is_bounded()) {
      throw std::logic_error("cannot sample an untruncated unbounded radius law");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return quantile(u(rng));
  }

  /// Sample conditioned on [lo, hi), which must carry positive mass.
  template<typename Generator>
  double sample_in(double lo, double hi, Generator& rng) const {
    if(kind_ == Kind::delta) {
      return a_;
    }
    const double f_lo = continuous_cdf(std::max(lo, 0.0));
    const double f_hi = continuous_cdf(hi);
    std::uniform_real_distribution<double> u(f_lo, f_hi);
    return std::clamp(quantile(u(rng)), lo, std::nextafter(hi, lo));
  }

  struct Moment {
    double value;
    bool finite;
  };

  /// rho(Q) = int r^d Q(dr).
  Moment rho_moment(int d) const {
    if(d < 1) {
      throw std::invalid_argument("rho_moment needs d >= 1");
    }
    switch(kind_) {
      case Kind::delta:
        return {std::pow(a_, d), true};
      case Kind::uniform:
        return {(std::pow(b_, d + 1) - std::pow(a_, d + 1)) / ((d + 1) * (b_ - a_)), true};
      case Kind::tabulated: {
        double total = 0.0;
        for(std::size_t i = 1; i < knots_.size(); ++i) {
          const double dm = cdf_[i] - cdf_[i - 1];
          if(dm <= 0) {
            continue;
          }
          const double a = knots_[i - 1];
          const double b = knots_[i];
          total += dm * (std::pow(b, d + 1) - std::pow(a, d + 1)) / ((d + 1) * (b - a));
        }
        return {total, true};
      }
      case Kind::exponential:
        if(!std::isfinite(trunc_)) {
          return {std::tgamma(d + 1.0) / std::pow(a_, d), true};
        }
        break;
      case Kind::pareto:
        if(!std::isfinite(trunc_)) {
          if(a_ <= d) {
            return {std::numeric_limits<double>::infinity(), false};
          }
          return {a_ * std::pow(b_, d) / (a_ - d), true};
        }
        break;
    }
    // Truncated continuous law: quadrature against the density.
    const double lo = kind_ == Kind::pareto ? b_ : 0.0;
    auto integrand = [&](double r) { return std::pow(r, d) * density(r); };
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, trunc_, 15, 1e-12);
    return {value, true};
  }

  std::string describe() const {
    switch(kind_) {
      case Kind::delta: return "delta(" + std::to_string(a_) + ")";
      case Kind::uniform: return "uniform(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
      case Kind::tabulated: return "tabulated(" + std::to_string(knots_.size()) + " knots)";
      case Kind::exponential: return "exponential(" + std::to_string(a_) + ")";
      case Kind::pareto: return "pareto(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    }
    return "?";
  }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& cdf_values() const { return cdf_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double truncation() const { return trunc_; }

 private:
  explicit RadiusLaw(Kind kind) : kind_(kind) {}

  double base_cdf(double r) const {
    if(r <= 0) {
      return 0.0;
    }
    if(kind_ == Kind::exponential) {
      return -std::expm1(-a_ * r);
    }
    return r < b_ ? 0.0 : 1.0 - std::pow(b_ / r, a_);
  }

  double continuous_cdf(double r) const {
    if(r <= 0) {
      return 0.0;
    }
    switch(kind_) {
      case Kind::uniform:
        return std::clamp((r - a_) / (b_ - a_), 0.0, 1.0);
      case Kind::tabulated: {
        if(r >= knots_.back()) {
          return 1.0;
        }
        if(r <= knots_.front()) {
          return 0.0;
        }
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
        const double t = (r - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
        return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
      }
      default: {
        const double f = base_cdf(std::min(r, trunc_));
        return std::isfinite(trunc_) ? f / (1.0 - tail_mass_) : f;
      }
    }
  }

  double density(double r) const {
    const double norm = 1.0 - tail_mass_;
    if(kind_ == Kind::exponential) {
      return a_ * std::exp(-a_ * r) / norm;
    }
    return r < b_ ? 0.0 : a_ * std::pow(b_, a_) / std::pow(r, a_ + 1) / norm;
  }

  double quantile(double u) const {
    switch(kind_) {
      case Kind::delta: return a_;
      case Kind::uniform: return a_ + u * (b_ - a_);
      case Kind::tabulated: {
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if(it == cdf_.begin()) {
          return knots_.front();
        }
        if(it == cdf_.end()) {
          return knots_.back();
        }
        const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        const double df = cdf_[i] - cdf_[i - 1];
        const double t = df > 0 ? (u - cdf_[i - 1]) / df : 0.0;
        return knots_[i - 1] + t * (knots_[i] - knots_[i - 1]);
      }
      case Kind::exponential: {
        const double p = u * (1.0 - tail_mass_);
        return std::min(-std::log1p(-p) / a_, trunc_);
      }
      case Kind::pareto: {
        const double p = u * (1.0 - tail_mass_);
        return std::min(b_ / std::pow(1.0 - p, 1.0 / a_), trunc_);
      }
    }
    return 0.0;
  }

  Kind kind_;
  double a_{0.0};
  double b_{0.0};
  double trunc_{std::numeric_limits<double>::infinity()};
  double tail_mass_{0.0};
  std::vector<double> knots_;
  std::vector<double> cdf_;
};

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_RADIUS_LAW_HPP
