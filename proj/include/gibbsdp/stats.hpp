#ifndef INCLUDE_GIBBSDP_STATS_HPP
#define INCLUDE_GIBBSDP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace gibbsdp {

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_{0};
  double mean_{0.0};
  double m2_{0.0};
};

struct TestResult {
  double statistic;
  double p_value;
  int dof;
};

inline double chi_square_survival(double statistic, int dof) {
  if(dof <= 0) {
    return 1.0;
  }
  boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

/// Two-sample chi-square homogeneity test on integer-valued samples. Adjacent
/// values are pooled until each bin holds at least min_pooled observations.
inline TestResult chi_square_two_sample(const std::vector<long>& a, const std::vector<long>& b,
                                        std::size_t min_pooled = 20) {
  if(a.empty() || b.empty()) {
    throw std::invalid_argument("chi_square_two_sample: empty sample");
  }
  std::map<long, std::pair<double, double>> hist;
  for(const long v: a) {
    hist[v].first += 1;
  }
  for(const long v: b) {
    hist[v].second += 1;
  }
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> cur{0, 0};
  for(const auto& [value, ab]: hist) {
    cur.first += ab.first;
    cur.second += ab.second;
    if(cur.first + cur.second >= static_cast<double>(min_pooled)) {
      bins.push_back(cur);
      cur = {0, 0};
    }
  }
  if(cur.first + cur.second > 0) {
    if(bins.empty()) {
      bins.push_back(cur);
    } else {
      bins.back().first += cur.first;
      bins.back().second += cur.second;
    }
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  double stat = 0.0;
  for(const auto& [x, y]: bins) {
    const double diff = ka * x - kb * y;
    stat += diff * diff / (x + y);
  }
  const int dof = static_cast<int>(bins.size()) - 1;
  return {stat, chi_square_survival(stat, dof), dof};
}

/// Goodness of fit of integer observations to a pmf on {0, 1, ...}. The
/// upper tail is pooled and bins are merged until each expects min_expected.
inline TestResult chi_square_gof(const std::vector<long>& observations, const std::function<double(long)>& pmf,
                                 double min_expected = 5.0) {
  if(observations.empty()) {
    throw std::invalid_argument("chi_square_gof: empty sample");
  }
  const double n = static_cast<double>(observations.size());
  const long top = *std::max_element(observations.begin(), observations.end());
  std::vector<double> observed(static_cast<std::size_t>(top) + 2, 0.0);
  for(const long v: observations) {
    if(v < 0) {
      throw std::invalid_argument("chi_square_gof: negative observation");
    }
    observed[static_cast<std::size_t>(v)] += 1;
  }
  std::vector<double> expected(observed.size(), 0.0);
  double acc = 0.0;
  for(long k = 0; k <= top; ++k) {
    expected[static_cast<std::size_t>(k)] = n * pmf(k);
    acc += pmf(k);
  }
  expected.back() = n * std::max(0.0, 1.0 - acc);
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> cur{0, 0};
  for(std::size_t k = 0; k < observed.size(); ++k) {
    cur.first += observed[k];
    cur.second += expected[k];
    if(cur.second >= min_expected) {
      bins.push_back(cur);
      cur = {0, 0};
    }
  }
  if(cur.first + cur.second > 0) {
    if(bins.empty()) {
      bins.push_back(cur);
    } else {
      bins.back().first += cur.first;
      bins.back().second += cur.second;
    }
  }
  double stat = 0.0;
  for(const auto& [o, e]: bins) {
    if(e > 0) {
      stat += (o - e) * (o - e) / e;
    } else if(o > 0) {
      stat = std::numeric_limits<double>::infinity();
    }
  }
  const int dof = static_cast<int>(bins.size()) - 1;
  return {stat, chi_square_survival(stat, dof), dof};
}

/// Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} e^{-2 k^2 x^2}.
inline double kolmogorov_survival(double x) {
  if(x < 0.2) {
    return 1.0;
  }
  double sum = 0.0;
  for(int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if(term < 1e-16) {
      break;
    }
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if(a.empty() || b.empty()) {
    throw std::invalid_argument("ks_two_sample: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while(i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while(i < a.size() && a[i] == v) {
      ++i;
    }
    while(j < b.size() && b[j] == v) {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d), 0};
}

/// P(Binomial(n, p) >= k).
inline double binomial_upper_tail(std::size_t k, std::size_t n, double p) {
  if(k == 0) {
    return 1.0;
  }
  if(k > n) {
    return 0.0;
  }
  if(p <= 0) {
    return 0.0;
  }
  if(p >= 1) {
    return 1.0;
  }
  boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(k - 1)));
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_STATS_HPP
