#ifndef INCLUDE_GIBBSDP_MODELS_HPP
#define INCLUDE_GIBBSDP_MODELS_HPP

// Hamiltonians with additive local energies. Every model exposes
//   energy(omega, ctx)  = H(omega | gamma) for a prepared boundary ctx,
//   h_min()             = lower bound of the local energy,
//   is_local(), name().

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "order.hpp"
#include "space.hpp"

namespace gibbsdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// The model lower bound forbids (Dom).
struct DomViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A boundary configuration prepared for repeated energy evaluations: balls
/// that cannot reach Delta are dropped and Gilbert components are labelled
/// over the full boundary.
template<int D>
class Context {
 public:
  Context() = default;

  explicit Context(std::span<const Point<D>> gamma) { build(gamma, nullptr); }
  explicit Context(const Configuration<D>& gamma) { build(gamma.span(), nullptr); }
  Context(const Configuration<D>& gamma, const Window<D>& window) { build(gamma.span(), &window); }

  std::span<const Point<D>> balls() const { return balls_; }
  std::size_t size() const { return balls_.size(); }
  bool empty() const { return balls_.empty(); }
  int component(std::size_t i) const { return labels_[i]; }
  int component_count() const { return components_; }

 private:
  void build(std::span<const Point<D>> gamma, const Window<D>* window) {
    auto dsu = gilbert_components<D>(gamma);
    std::vector<int> compact(gamma.size(), -1);
    for(std::size_t i = 0; i < gamma.size(); ++i) {
      if(window && !may_reach(gamma[i], *window)) {
        continue;
      }
      const std::size_t root = dsu.find(i);
      if(compact[root] < 0) {
        compact[root] = components_++;
      }
      balls_.push_back(gamma[i]);
      labels_.push_back(compact[root]);
    }
  }

  static bool may_reach(const Point<D>& y, const Window<D>& window) {
    BoxProbe<D> box{window.lo(), window.hi()};
    const i128 reach = static_cast<i128>(y.radius) + window.r_max_raw();
    return squared_distance_to_box<D>(y.center, box) <= reach * reach;
  }

  std::vector<Point<D>> balls_;
  std::vector<int> labels_;
  int components_{0};
};

template<int D>
inline std::size_t count_intersections(const Point<D>& x, std::span<const Point<D>> others) {
  return static_cast<std::size_t>(
      std::count_if(others.begin(), others.end(), [&](const auto& y) { return balls_intersect(x, y); }));
}

template<int D>
struct FreeModel {
  std::string name() const { return "free"; }
  double h_min() const { return 0.0; }
  bool is_local() const { return true; }
  double energy(std::span<const Point<D>>, const Context<D>&) const { return 0.0; }
};

template<int D>
struct HardSphere {
  std::string name() const { return "hard_sphere"; }
  double h_min() const { return 0.0; }
  bool is_local() const { return true; }

  double energy(std::span<const Point<D>> omega, const Context<D>& ctx) const {
    for(std::size_t i = 0; i < omega.size(); ++i) {
      if(intersects_any<D>(omega[i], ctx.balls()) || intersects_any<D>(omega[i], omega.subspan(i + 1))) {
        return kInfinity;
      }
    }
    return 0.0;
  }
};

/// beta times the number of overlapping pairs.
template<int D>
struct Strauss {
  double beta{0.0};

  explicit Strauss(double b = 0.0) : beta(b) {
    if(!(beta >= 0)) {
      throw std::invalid_argument("Strauss beta must be >= 0");
    }
  }

  std::string name() const { return "strauss"; }
  double h_min() const { return 0.0; }
  bool is_local() const { return true; }

  double energy(std::span<const Point<D>> omega, const Context<D>& ctx) const {
    std::size_t pairs = 0;
    for(std::size_t i = 0; i < omega.size(); ++i) {
      pairs += count_intersections<D>(omega[i], ctx.balls());
      pairs += count_intersections<D>(omega[i], omega.subspan(i + 1));
    }
    return beta * static_cast<double>(pairs);
  }
};

/// Continuum random cluster model: e^{-H(omega|gamma)} = q^{C(omega u gamma) - C(gamma)}.
template<int D>
struct Crcm {
  double q{1.0};

  explicit Crcm(double q_ = 1.0) : q(q_) {
    if(!(q > 0)) {
      throw std::invalid_argument("CRCM q must be positive");
    }
  }

  std::string name() const { return "crcm"; }
  double h_min() const {
    if(q < 1) {
      // -log q (1 - k) is unbounded below in k.
      return -kInfinity;
    }
    return -std::log(q);
  }
  bool is_local() const { return true; }

  /// C(omega u gamma) - C(gamma).
  long component_change(std::span<const Point<D>> omega, const Context<D>& ctx) const {
    const std::size_t n = omega.size();
    DisjointSet dsu(n + static_cast<std::size_t>(ctx.component_count()));
    for_each_edge<D>(omega, [&](std::size_t i, std::size_t j) { dsu.unite(i, j); });
    std::vector<char> touched(static_cast<std::size_t>(ctx.component_count()), 0);
    const auto balls = ctx.balls();
    for(std::size_t i = 0; i < n; ++i) {
      for(std::size_t j = 0; j < balls.size(); ++j) {
        if(balls_intersect(omega[i], balls[j])) {
          const auto c = static_cast<std::size_t>(ctx.component(j));
          touched[c] = 1;
          dsu.unite(i, n + c);
        }
      }
    }
    // Untouched boundary components cancel; touched ones merge into omega components.
    long roots = 0;
    for(std::size_t i = 0; i < n; ++i) {
      if(dsu.find(i) == i) {
        ++roots;
      }
    }
    for(std::size_t c = 0; c < touched.size(); ++c) {
      if(touched[c] && dsu.find(n + c) == n + c) {
        ++roots;
      }
    }
    const long touched_count = std::count(touched.begin(), touched.end(), char{1});
    return roots - touched_count;
  }

  double energy(std::span<const Point<D>> omega, const Context<D>& ctx) const {
    if(omega.empty()) {
      return 0.0;
    }
    return -std::log(q) * static_cast<double>(component_change(omega, ctx));
  }
};

// ---------------------------------------------------------------------------
// Planar disk unions.

struct Disk {
  double x;
  double y;
  double r;
};

struct UnionMeasure {
  double area;
  double perimeter;
};

/// Area and perimeter of a union of closed disks, integrating over the
/// exposed boundary arcs.
inline UnionMeasure disk_union(std::span<const Disk> disks) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double area = 0.0;
  double perimeter = 0.0;
  std::vector<std::pair<double, double>> covered;
  for(std::size_t i = 0; i < disks.size(); ++i) {
    const Disk& a = disks[i];
    if(a.r <= 0) {
      continue;
    }
    bool hidden = false;
    covered.clear();
    for(std::size_t j = 0; j < disks.size() && !hidden; ++j) {
      if(i == j) {
        continue;
      }
      const Disk& b = disks[j];
      const double dx = b.x - a.x;
      const double dy = b.y - a.y;
      const double d = std::hypot(dx, dy);
      if(d == 0 && a.r == b.r) {
        hidden = j < i;  // duplicates: keep the first copy
        continue;
      }
      if(d + a.r <= b.r) {
        hidden = true;
        continue;
      }
      if(d >= a.r + b.r || d + b.r <= a.r) {
        continue;
      }
      const double c = std::clamp((a.r * a.r + d * d - b.r * b.r) / (2.0 * a.r * d), -1.0, 1.0);
      const double half = std::acos(c);
      const double mid = std::atan2(dy, dx);
      double lo = mid - half;
      double hi = mid + half;
      lo -= two_pi * std::floor(lo / two_pi);
      hi = lo + 2.0 * half;
      if(hi > two_pi) {
        covered.emplace_back(lo, two_pi);
        covered.emplace_back(0.0, hi - two_pi);
      } else {
        covered.emplace_back(lo, hi);
      }
    }
    if(hidden) {
      continue;
    }
    std::sort(covered.begin(), covered.end());
    auto exposed = [&](double t0, double t1) {
      if(t1 <= t0) {
        return;
      }
      area += 0.5 * (a.r * a.r * (t1 - t0) + a.x * a.r * (std::sin(t1) - std::sin(t0)) -
                     a.y * a.r * (std::cos(t1) - std::cos(t0)));
      perimeter += a.r * (t1 - t0);
    };
    double cursor = 0.0;
    for(const auto& [lo, hi]: covered) {
      exposed(cursor, lo);
      cursor = std::max(cursor, hi);
    }
    exposed(cursor, two_pi);
  }
  return {area, perimeter};
}

/// Area of the intersection of two disks.
inline double lens_area(double r1, double r2, double d) {
  if(d >= r1 + r2) {
    return 0.0;
  }
  const double small = std::min(r1, r2);
  if(d <= std::abs(r1 - r2)) {
    return std::numbers::pi * small * small;
  }
  const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
  const double k = 0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)));
  return r1 * r1 * a1 + r2 * r2 * a2 - k;
}

template<int D>
inline Disk to_disk(const Point<D>& p) {
  static_assert(D == 2);
  return {p.x(0), p.x(1), p.r()};
}

struct ValueWithError {
  double value;
  double std_error;
};

/// L(B(X) minus the union of the balls of omega). Closed form when at most
/// one ball of omega overlaps X, Monte Carlo otherwise (or when forced).
template<typename Generator>
inline ValueWithError area_variation(const Point<2>& x, const Configuration<2>& omega, std::size_t budget,
                                     Generator& rng, bool force_mc = false) {
  if(budget == 0) {
    throw std::invalid_argument("area_variation: budget must be positive");
  }
  const Disk dx = to_disk(x);
  std::vector<Disk> near;
  for(const auto& y: omega) {
    if(balls_intersect(x, y)) {
      near.push_back(to_disk(y));
    }
  }
  const double full = std::numbers::pi * dx.r * dx.r;
  if(!force_mc && near.empty()) {
    return {full, 0.0};
  }
  if(!force_mc && near.size() == 1) {
    const double d = std::hypot(near[0].x - dx.x, near[0].y - dx.y);
    return {full - lens_area(dx.r, near[0].r, d), 0.0};
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t hits = 0;
  for(std::size_t s = 0; s < budget; ++s) {
    const double rad = dx.r * std::sqrt(u(rng));
    const double ang = 2.0 * std::numbers::pi * u(rng);
    const double px = dx.x + rad * std::cos(ang);
    const double py = dx.y + rad * std::sin(ang);
    const bool inside = std::any_of(near.begin(), near.end(), [&](const Disk& b) {
      return (px - b.x) * (px - b.x) + (py - b.y) * (py - b.y) <= b.r * b.r;
    });
    if(!inside) {
      ++hits;
    }
  }
  const double f = static_cast<double>(hits) / static_cast<double>(budget);
  return {full * f, full * std::sqrt(f * (1 - f) / static_cast<double>(budget))};
}

/// theta1 * area variation + theta2 * perimeter variation (planar only).
template<int D>
struct AreaInteraction {
  double theta1{0.0};
  double theta2{0.0};
  double r_max{0.0};
  std::optional<double> h_min_override{};

  std::string name() const { return "area_interaction"; }
  bool is_local() const { return true; }

  double h_min() const {
    if(h_min_override) {
      return *h_min_override;
    }
    if(theta2 != 0) {
      throw std::invalid_argument("area_interaction with a perimeter term needs an explicit h_min");
    }
    return std::min(0.0, theta1 * std::numbers::pi * r_max * r_max);
  }

  double energy(std::span<const Point<D>> omega, const Context<D>& ctx) const {
    if constexpr(D != 2) {
      throw std::logic_error("area_interaction is only defined in the plane");
    } else {
      if(omega.empty()) {
        return 0.0;
      }
      std::vector<Disk> with;
      std::vector<Disk> without;
      for(const auto& y: ctx.balls()) {
        if(intersects_any<D>(y, omega)) {
          with.push_back(to_disk(y));
          without.push_back(to_disk(y));
        }
      }
      for(const auto& x: omega) {
        with.push_back(to_disk(x));
      }
      const auto a = disk_union(with);
      const auto b = disk_union(without);
      double e = theta1 * (a.area - b.area);
      if(theta2 != 0) {
        e += theta2 * (a.perimeter - b.perimeter);
      }
      return e;
    }
  }
};

// ---------------------------------------------------------------------------
// Runtime-selected model.

template<int D>
class AnyModel {
 public:
  using Variant = std::variant<FreeModel<D>, HardSphere<D>, Strauss<D>, Crcm<D>, AreaInteraction<D>>;

  AnyModel() = default;
  template<typename M>
  AnyModel(M model) : model_(std::move(model)) {}

  std::string name() const {
    return std::visit([](const auto& m) { return m.name(); }, model_);
  }
  double h_min() const {
    return std::visit([](const auto& m) { return m.h_min(); }, model_);
  }
  bool is_local() const {
    return std::visit([](const auto& m) { return m.is_local(); }, model_);
  }
  double energy(std::span<const Point<D>> omega, const Context<D>& ctx) const {
    return std::visit([&](const auto& m) { return m.energy(omega, ctx); }, model_);
  }

  const Variant& variant() const { return model_; }

 private:
  Variant model_{FreeModel<D>{}};
};

// ---------------------------------------------------------------------------
// Generic operations.

template<typename Model, int D>
inline double energy(const Model& model, const Configuration<D>& omega, const Configuration<D>& gamma) {
  return model.energy(omega.span(), Context<D>(gamma));
}

template<typename Model, int D>
inline double boltzmann(const Model& model, std::span<const Point<D>> omega, const Context<D>& ctx) {
  const double e = model.energy(omega, ctx);
  return e == kInfinity ? 0.0 : std::exp(-e);
}

/// H_X(X | omega).
template<typename Model, int D>
inline double local_energy(const Model& model, const Point<D>& x, const Configuration<D>& omega) {
  if(omega.contains(x)) {
    throw std::invalid_argument("local_energy: X already belongs to omega");
  }
  return model.energy(std::span<const Point<D>>(&x, 1), Context<D>(omega));
}

/// H(omega | gamma) accumulated point by point in increasing key order.
template<typename Model, int D>
inline double hamiltonian(const Model& model, const Window<D>& window, const Configuration<D>& omega,
                          const Configuration<D>& gamma) {
  for(const auto& p: omega) {
    if(gamma.contains(p)) {
      throw std::invalid_argument("hamiltonian: omega and gamma overlap");
    }
  }
  double total = 0.0;
  Configuration<D> context = gamma;
  for(const auto& x: sorted_by_order(omega, window)) {
    total += local_energy(model, x, context);
    if(total == kInfinity) {
      return kInfinity;
    }
    context.insert(x);
  }
  return total;
}

/// Number of Gilbert components of omega met by the ball of X.
template<int D>
inline std::size_t k_components(const Point<D>& x, const Configuration<D>& omega) {
  if(omega.contains(x)) {
    throw std::invalid_argument("k_components: X already belongs to omega");
  }
  auto dsu = gilbert_components<D>(omega.span());
  std::vector<std::size_t> roots;
  for(std::size_t i = 0; i < omega.size(); ++i) {
    if(balls_intersect(x, omega[i])) {
      roots.push_back(dsu.find(i));
    }
  }
  std::sort(roots.begin(), roots.end());
  return static_cast<std::size_t>(std::unique(roots.begin(), roots.end()) - roots.begin());
}

/// alpha = lambda e^{-h_min}.
template<typename Model>
inline double dom_level(const Model& model, double lambda) {
  if(!(lambda >= 0)) {
    throw std::invalid_argument("dom_level: lambda must be nonnegative");
  }
  const double h = model.h_min();
  if(!(h > -kInfinity)) {
    throw DomViolation("model " + model.name() + " has no finite energy lower bound");
  }
  return lambda * std::exp(-h);
}

/// Whether H(omega | gamma) equals H(omega | empty).
template<typename Model, int D>
inline bool check_loc(const Model& model, const Configuration<D>& omega, const Configuration<D>& gamma,
                      double tolerance = 1e-9) {
  const double a = energy(model, omega, gamma);
  const double b = energy(model, omega, Configuration<D>{});
  if(std::isinf(a) || std::isinf(b)) {
    return a == b;
  }
  return std::abs(a - b) <= tolerance * std::max(1.0, std::abs(b));
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_MODELS_HPP
