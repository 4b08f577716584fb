#ifndef INCLUDE_GIBBSDP_SPACE_HPP
#define INCLUDE_GIBBSDP_SPACE_HPP

// Balls in R^d with fixed-point dyadic coordinates, finite configurations,
// the Gilbert graph and its connectivity, and influence zones.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace gibbsdp {

// All coordinates are stored as signed integers scaled by 2^kFracBits.
inline constexpr int kFracBits = 32;
inline constexpr double kScale = 4294967296.0;  // 2^32
// |coordinate| must stay below 2^20 so squared distances fit in 128 bits.
inline constexpr std::int64_t kMaxRaw = std::int64_t{1} << 52;

using i128 = __int128;

inline std::int64_t to_raw(double value) {
  const double scaled = std::nearbyint(value * kScale);
  if(!(std::abs(scaled) < static_cast<double>(kMaxRaw))) {
    throw std::out_of_range("coordinate out of representable range: " + std::to_string(value));
  }
  return static_cast<std::int64_t>(scaled);
}

inline constexpr double to_double(std::int64_t raw) {
  return static_cast<double>(raw) / kScale;
}

// Floor of raw to the grid of W fractional bits.
inline constexpr std::int64_t floor_to_grid(std::int64_t raw, int frac_bits) {
  const int shift = kFracBits - frac_bits;
  return (raw >> shift) << shift;
}

inline constexpr bool on_grid(std::int64_t raw, int frac_bits) {
  return floor_to_grid(raw, frac_bits) == raw;
}

/// A ball X = (x, r): center in R^D plus radius.
template<int D>
struct Point {
  static_assert(D >= 1 && D <= 3, "supported dimensions are 1, 2 and 3");
  std::array<std::int64_t, D> center{};
  std::int64_t radius{0};

  static Point from_double(const std::array<double, D>& x, double r) {
    if(r < 0) {
      throw std::invalid_argument("radius must be nonnegative");
    }
    Point p;
    for(int i = 0; i < D; ++i) {
      p.center[i] = to_raw(x[i]);
    }
    p.radius = to_raw(r);
    return p;
  }

  double x(int i) const { return to_double(center[i]); }
  double r() const { return to_double(radius); }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

template<int D>
inline i128 squared_distance_raw(const std::array<std::int64_t, D>& a, const std::array<std::int64_t, D>& b) {
  i128 sum = 0;
  for(int i = 0; i < D; ++i) {
    const i128 diff = static_cast<i128>(a[i]) - b[i];
    sum += diff * diff;
  }
  return sum;
}

/// Euclidean distance between two vectors of equal dimension.
inline double dist(std::span<const double> x, std::span<const double> y) {
  if(x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("dist: dimension mismatch");
  }
  double sum = 0.0;
  for(std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

template<int D>
inline double dist(const Point<D>& a, const Point<D>& b) {
  return std::sqrt(static_cast<double>(squared_distance_raw<D>(a.center, b.center))) / kScale;
}

/// Closed balls: tangency counts as intersection. Exact integer test.
template<int D>
inline bool balls_intersect(const Point<D>& a, const Point<D>& b) {
  const i128 reach = static_cast<i128>(a.radius) + b.radius;
  return squared_distance_raw<D>(a.center, b.center) <= reach * reach;
}

/// A finite simple configuration of balls.
template<int D>
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::initializer_list<Point<D>> points) {
    for(const auto& p: points) {
      insert(p);
    }
  }
  explicit Configuration(std::vector<Point<D>> points) {
    for(const auto& p: points) {
      insert(p);
    }
  }

  // Caller guarantees distinct points.
  static Configuration from_unique(std::vector<Point<D>> points) {
    Configuration c;
    c.points_ = std::move(points);
    return c;
  }

  // Throws on duplicates.
  void insert(const Point<D>& p) {
    if(!try_insert(p)) {
      throw std::invalid_argument("configuration already contains this point");
    }
  }

  bool try_insert(const Point<D>& p) {
    if(contains(p)) {
      return false;
    }
    points_.push_back(p);
    return true;
  }

  bool contains(const Point<D>& p) const {
    return std::find(points_.begin(), points_.end(), p) != points_.end();
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point<D>& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  std::span<const Point<D>> span() const { return points_; }
  const std::vector<Point<D>>& points() const { return points_; }

  void reserve(std::size_t n) { points_.reserve(n); }
  void clear() { points_.clear(); }

  // Set equality, independent of insertion order.
  bool same_set(const Configuration& other) const {
    if(size() != other.size()) {
      return false;
    }
    return std::all_of(points_.begin(), points_.end(), [&](const auto& p) { return other.contains(p); });
  }

  bool subset_of(const Configuration& other) const {
    return std::all_of(points_.begin(), points_.end(), [&](const auto& p) { return other.contains(p); });
  }

 private:
  std::vector<Point<D>> points_;
};

template<int D>
inline Configuration<D> merge(const Configuration<D>& a, const Configuration<D>& b) {
  Configuration<D> out = a;
  for(const auto& p: b) {
    out.try_insert(p);
  }
  return out;
}

// Points of a that are not in b.
template<int D>
inline Configuration<D> difference(const Configuration<D>& a, const Configuration<D>& b) {
  Configuration<D> out;
  for(const auto& p: a) {
    if(!b.contains(p)) {
      out.insert(p);
    }
  }
  return out;
}

template<int D>
inline Configuration<D> symmetric_difference(const Configuration<D>& a, const Configuration<D>& b) {
  return merge(difference(a, b), difference(b, a));
}

template<int D>
inline bool intersects_any(const Point<D>& x, std::span<const Point<D>> others) {
  return std::any_of(others.begin(), others.end(), [&](const auto& y) { return balls_intersect(x, y); });
}

/// The simulation domain Delta = Lambda x [0, r_max], with Lambda = [lo, hi) an
/// axis-aligned box, and W fractional bits of resolution.
template<int D>
class Window {
 public:
  Window(const std::array<double, D>& lo, const std::array<double, D>& hi, double r_max, int frac_bits = 32)
      : frac_bits_(frac_bits) {
    if(frac_bits < 0 || frac_bits > kFracBits) {
      throw std::invalid_argument("frac_bits must lie in [0, 32]");
    }
    for(int i = 0; i < D; ++i) {
      lo_[i] = round_to_grid(to_raw(lo[i]));
      hi_[i] = round_to_grid(to_raw(hi[i]));
      if(!(hi_[i] > lo_[i])) {
        throw std::invalid_argument("window box must be nonempty");
      }
    }
    // Rounded up so that a radius law supported on [0, r_max] still fits.
    r_max_ = to_raw(std::ceil(r_max * kScale) / kScale);
    r_max_ = floor_to_grid(r_max_ + (std::int64_t{1} << (kFracBits - frac_bits_)) - 1, frac_bits_);
    if(!(r_max_ > 0)) {
      throw std::invalid_argument("r_max must be positive");
    }
    std::int64_t widest = r_max_;
    for(int i = 0; i < D; ++i) {
      widest = std::max(widest, hi_[i] - lo_[i]);
    }
    // Integer bits so that every component (in grid units) is < 2^(P+W).
    const std::int64_t units = widest >> (kFracBits - frac_bits_);
    int_bits_ = 0;
    while((std::int64_t{1} << (int_bits_ + frac_bits_)) <= units) {
      ++int_bits_;
    }
    if((D + 1) * (int_bits_ + frac_bits_) > 252) {
      throw std::invalid_argument("window too large for the order key width at this resolution");
    }
  }

  int frac_bits() const { return frac_bits_; }
  int int_bits() const { return int_bits_; }
  int digits() const { return int_bits_ + frac_bits_; }
  const std::array<std::int64_t, D>& lo() const { return lo_; }
  const std::array<std::int64_t, D>& hi() const { return hi_; }
  std::int64_t r_max_raw() const { return r_max_; }
  double r_max() const { return to_double(r_max_); }
  double lo(int i) const { return to_double(lo_[i]); }
  double hi(int i) const { return to_double(hi_[i]); }
  double extent(int i) const { return to_double(hi_[i] - lo_[i]); }
  // Number of grid cells along axis i.
  std::int64_t cells(int i) const { return (hi_[i] - lo_[i]) >> (kFracBits - frac_bits_); }
  std::int64_t grid_step() const { return std::int64_t{1} << (kFracBits - frac_bits_); }

  double volume() const {
    double v = 1.0;
    for(int i = 0; i < D; ++i) {
      v *= extent(i);
    }
    return v;
  }

  bool contains_center(const std::array<std::int64_t, D>& x) const {
    for(int i = 0; i < D; ++i) {
      if(x[i] < lo_[i] || x[i] >= hi_[i]) {
        return false;
      }
    }
    return true;
  }

  /// Membership in Delta.
  bool contains(const Point<D>& p) const {
    return contains_center(p.center) && p.radius >= 0 && p.radius <= r_max_;
  }

  std::int64_t round_to_grid(std::int64_t raw) const {
    const std::int64_t step = std::int64_t{1} << (kFracBits - frac_bits_);
    const std::int64_t half = step / 2;
    return floor_to_grid(raw + half, frac_bits_);
  }

  friend bool operator==(const Window&, const Window&) = default;

 private:
  std::array<std::int64_t, D> lo_{};
  std::array<std::int64_t, D> hi_{};
  std::int64_t r_max_{0};
  int frac_bits_{32};
  int int_bits_{0};
};

/// A decidable subset of Delta: points of Delta that touch none of `blocked`
/// and, when `required` is set, touch at least one ball of `required`.
/// Influence zones and their complements are both of this form.
template<int D>
struct Region {
  Configuration<D> blocked;
  std::optional<Configuration<D>> required;

  static Region full() { return {}; }

  bool contains(const Point<D>& p) const {
    if(intersects_any<D>(p, blocked.span())) {
      return false;
    }
    if(required) {
      return intersects_any<D>(p, required->span());
    }
    return true;
  }

  bool is_full() const { return blocked.empty() && !required.has_value(); }
  // True when the membership predicate is constantly false.
  bool trivially_empty() const { return required.has_value() && required->empty(); }
};

/// Gamma = {X in Delta : B(X) meets some ball of the boundary}.
template<int D>
inline Region<D> influence_zone(const Window<D>& window, const Configuration<D>& boundary) {
  for(const auto& y: boundary) {
    if(window.contains_center(y.center)) {
      throw std::invalid_argument("influence_zone: boundary point inside the window");
    }
  }
  Region<D> region;
  region.required = boundary;
  return region;
}

/// Delta minus the influence zone of `boundary`.
template<int D>
inline Region<D> outside_influence(const Configuration<D>& boundary) {
  Region<D> region;
  region.blocked = boundary;
  return region;
}

// ---------------------------------------------------------------------------
// Disjoint sets and the Gilbert graph.

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i) {
    while(parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if(a == b) {
      return false;
    }
    if(rank_[a] < rank_[b]) {
      std::swap(a, b);
    }
    parent_[b] = a;
    if(rank_[a] == rank_[b]) {
      ++rank_[a];
    }
    return true;
  }

  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

// Calls f(i, j) for every edge i < j of the Gilbert graph of the points.
template<int D, typename F>
inline void for_each_edge(std::span<const Point<D>> points, F&& f) {
  const std::size_t n = points.size();
  if(n < 96) {
    for(std::size_t i = 0; i < n; ++i) {
      for(std::size_t j = i + 1; j < n; ++j) {
        if(balls_intersect(points[i], points[j])) {
          f(i, j);
        }
      }
    }
    return;
  }
  // Uniform grid along the first axis with cell width 2 * max radius.
  std::int64_t max_r = 0;
  std::int64_t min_x = points[0].center[0];
  for(const auto& p: points) {
    max_r = std::max(max_r, p.radius);
    min_x = std::min(min_x, p.center[0]);
  }
  const std::int64_t width = std::max<std::int64_t>(2 * max_r, 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::int64_t> slab(n);
  for(std::size_t i = 0; i < n; ++i) {
    slab[i] = (points[i].center[0] - min_x) / width;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return slab[a] < slab[b]; });
  for(std::size_t a = 0; a < n; ++a) {
    const std::size_t i = order[a];
    for(std::size_t b = a + 1; b < n && slab[order[b]] <= slab[i] + 1; ++b) {
      const std::size_t j = order[b];
      if(balls_intersect(points[i], points[j])) {
        f(std::min(i, j), std::max(i, j));
      }
    }
  }
}

template<int D>
inline DisjointSet gilbert_components(std::span<const Point<D>> points) {
  DisjointSet dsu(points.size());
  for_each_edge<D>(points, [&](std::size_t i, std::size_t j) { dsu.unite(i, j); });
  return dsu;
}

template<int D>
inline std::size_t count_components(std::span<const Point<D>> points) {
  auto dsu = gilbert_components<D>(points);
  std::size_t count = 0;
  for(std::size_t i = 0; i < points.size(); ++i) {
    if(dsu.find(i) == i) {
      ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Connectivity sources and targets.

/// A single ball; a radius-0 ball is a spatial point probe (x, 0).
template<int D>
struct BallProbe {
  Point<D> ball;
};

/// A closed axis-aligned box, treated as the set of radius-0 probes it contains.
template<int D>
struct BoxProbe {
  std::array<std::int64_t, D> lo{};
  std::array<std::int64_t, D> hi{};

  static BoxProbe from_double(const std::array<double, D>& lo, const std::array<double, D>& hi) {
    BoxProbe b;
    for(int i = 0; i < D; ++i) {
      b.lo[i] = to_raw(lo[i]);
      b.hi[i] = to_raw(hi[i]);
      if(b.hi[i] < b.lo[i]) {
        throw std::invalid_argument("box probe with hi < lo");
      }
    }
    return b;
  }
};

template<int D>
struct ConfigurationProbe {
  Configuration<D> points;
};

/// The closed complement {x : |x - c| >= radius} of an open ball.
template<int D>
struct ExteriorProbe {
  std::array<std::int64_t, D> center{};
  std::int64_t radius{0};

  static ExteriorProbe from_double(const std::array<double, D>& c, double radius) {
    ExteriorProbe e;
    for(int i = 0; i < D; ++i) {
      e.center[i] = to_raw(c[i]);
    }
    e.radius = to_raw(radius);
    return e;
  }
};

template<int D>
using Probe = std::variant<BallProbe<D>, BoxProbe<D>, ConfigurationProbe<D>, ExteriorProbe<D>>;

template<int D>
inline i128 squared_distance_to_box(const std::array<std::int64_t, D>& x, const BoxProbe<D>& box) {
  i128 sum = 0;
  for(int i = 0; i < D; ++i) {
    i128 diff = 0;
    if(x[i] < box.lo[i]) {
      diff = static_cast<i128>(box.lo[i]) - x[i];
    } else if(x[i] > box.hi[i]) {
      diff = static_cast<i128>(x[i]) - box.hi[i];
    }
    sum += diff * diff;
  }
  return sum;
}

template<int D>
inline i128 squared_farthest_in_box(const std::array<std::int64_t, D>& x, const BoxProbe<D>& box) {
  i128 sum = 0;
  for(int i = 0; i < D; ++i) {
    const i128 a = static_cast<i128>(x[i]) - box.lo[i];
    const i128 b = static_cast<i128>(box.hi[i]) - x[i];
    const i128 far = std::max(a < 0 ? -a : a, b < 0 ? -b : b);
    sum += far * far;
  }
  return sum;
}

/// Whether the ball Y meets the probe set.
template<int D>
inline bool touches(const Probe<D>& probe, const Point<D>& y) {
  return std::visit([&](const auto& p) -> bool {
    using T = std::decay_t<decltype(p)>;
    if constexpr(std::is_same_v<T, BallProbe<D>>) {
      return balls_intersect(p.ball, y);
    } else if constexpr(std::is_same_v<T, BoxProbe<D>>) {
      const i128 r = y.radius;
      return squared_distance_to_box<D>(y.center, p) <= r * r;
    } else if constexpr(std::is_same_v<T, ConfigurationProbe<D>>) {
      return intersects_any<D>(y, p.points.span());
    } else {
      const i128 gap = static_cast<i128>(p.radius) - y.radius;
      if(gap <= 0) {
        return true;
      }
      return squared_distance_raw<D>(y.center, p.center) >= gap * gap;
    }
  }, probe);
}

/// Whether two probe sets meet directly (a path of length zero).
template<int D>
inline bool probes_touch(const Probe<D>& a, const Probe<D>& b) {
  if(const auto* ball = std::get_if<BallProbe<D>>(&a)) {
    return touches(b, ball->ball);
  }
  if(const auto* ball = std::get_if<BallProbe<D>>(&b)) {
    return touches(a, ball->ball);
  }
  if(const auto* conf = std::get_if<ConfigurationProbe<D>>(&a)) {
    return std::any_of(conf->points.begin(), conf->points.end(), [&](const auto& y) { return touches(b, y); });
  }
  if(const auto* conf = std::get_if<ConfigurationProbe<D>>(&b)) {
    return std::any_of(conf->points.begin(), conf->points.end(), [&](const auto& y) { return touches(a, y); });
  }
  const auto* box_a = std::get_if<BoxProbe<D>>(&a);
  const auto* box_b = std::get_if<BoxProbe<D>>(&b);
  if(box_a && box_b) {
    for(int i = 0; i < D; ++i) {
      if(box_a->hi[i] < box_b->lo[i] || box_b->hi[i] < box_a->lo[i]) {
        return false;
      }
    }
    return true;
  }
  if(box_a || box_b) {
    const auto& box = box_a ? *box_a : *box_b;
    const auto& ext = box_a ? std::get<ExteriorProbe<D>>(b) : std::get<ExteriorProbe<D>>(a);
    const i128 r = ext.radius;
    return squared_farthest_in_box<D>(ext.center, box) >= r * r;
  }
  return true;  // two exteriors of bounded balls always meet
}

/// Whether a path joins source and target in the Gilbert graph of omega
/// augmented by the probes.
template<int D>
inline bool connected(const Configuration<D>& omega, const Probe<D>& source, const Probe<D>& target) {
  if(probes_touch(source, target)) {
    return true;
  }
  const auto points = omega.span();
  auto dsu = gilbert_components<D>(points);
  std::vector<char> reached(points.size(), 0);
  bool any = false;
  for(std::size_t i = 0; i < points.size(); ++i) {
    if(touches(source, points[i])) {
      reached[dsu.find(i)] = 1;
      any = true;
    }
  }
  if(!any) {
    return false;
  }
  for(std::size_t i = 0; i < points.size(); ++i) {
    if(reached[dsu.find(i)] && touches(target, points[i])) {
      return true;
    }
  }
  return false;
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_SPACE_HPP
