// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gibbsdp/cli.hpp"
#include "gibbsdp/coupling.hpp"
#include "gibbsdp/diagnostics.hpp"
#include "gibbsdp/partition.hpp"
#include "gibbsdp/percolation.hpp"
#include "gibbsdp/stats.hpp"
#include "gibbsdp/thinning.hpp"
#include "oracles/oracles.hpp"

using namespace gibbsdp;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template<int D>
Point<D> pt(std::array<double, D> x, double r) {
  return Point<D>::from_double(x, r);
}

template<int D>
std::vector<oracle::Ball<D>> balls(const Configuration<D>& c) {
  std::vector<oracle::Ball<D>> out;
  for(const auto& p: c) {
    oracle::Ball<D> b;
    for(int i = 0; i < D; ++i) {
      b.x[i] = p.x(i);
    }
    b.r = p.r();
    out.push_back(b);
  }
  return out;
}

template<int D>
void nn_distances(const Configuration<D>& c, std::vector<double>& out) {
  for(std::size_t i = 0; i < c.size(); ++i) {
    double best = kInfinity;
    for(std::size_t j = 0; j < c.size(); ++j) {
      if(i != j) {
        double s = 0;
        for(int k = 0; k < D; ++k) {
          s += (c[i].x(k) - c[j].x(k)) * (c[i].x(k) - c[j].x(k));
        }
        best = std::min(best, std::sqrt(s));
      }
    }
    if(c.size() > 1) {
      out.push_back(best);
    }
  }
}

// ---------------------------------------------------------------------------
// 1. thinning marginal vs rejection

Outcome criterion1() {
  const int n = 100000;
  Rng rng(101);
  std::vector<long> a, b;
  {
    const Window<1> window({0.0}, {1.0}, 0.2);
    const auto law = RadiusLaw::delta(0.2);
    const auto kernel = ThinningKernel<HardSphere<1>, 1>::make({}, 0.5, law, window, {}, {}, 0.5);
    for(int i = 0; i < n; ++i) {
      a.push_back(static_cast<long>(thin_sample(kernel, rng).kept.size()));
      b.push_back(static_cast<long>(
          gibbs_rejection_sample(HardSphere<1>{}, 0.5, OrderInterval<1>{}, Configuration<1>{}, law, window, rng)
              .size()));
    }
  }
  const double p_rods = chi_square_two_sample(a, b).p_value;
  a.clear();
  b.clear();
  {
    const Window<2> window({0, 0}, {1, 1}, 0.1);
    const auto law = RadiusLaw::delta(0.1);
    const Crcm<2> model(2.0);
    const auto kernel = ThinningKernel<Crcm<2>, 2>::make(model, 0.3, law, window, {}, {}, 0.6);
    const Context<2> ctx(Configuration<2>{}, window);
    for(int i = 0; i < n; ++i) {
      a.push_back(static_cast<long>(thin_sample(kernel, rng).kept.size()));
      b.push_back(static_cast<long>(
          gibbs_rejection_sample(model, 0.3, OrderInterval<2>{}, ctx, law, window, 0.6, rng).size()));
    }
  }
  const double p_crcm = chi_square_two_sample(a, b).p_value;
  return {p_rods > 0.01 && p_crcm > 0.01,
          "hard rods p=" + fmt("%.4f", p_rods) + ", CRCM p=" + fmt("%.4f", p_crcm) + " (1e5 draws each)"};
}

// ---------------------------------------------------------------------------
// 2. closed form vs finite difference of the log partition function

struct FdStats {
  double max_rel{0.0};
  double max_rel_se{0.0};
  double max_fd_bias{0.0};
  int triples{0};
  bool ok{true};
};

void record(FdStats& st, double p_lib, double se_lib, double p_fd, double se_fd, double bias) {
  const double rel = std::abs(p_lib - p_fd) / p_fd;
  st.max_rel = std::max(st.max_rel, rel);
  st.max_rel_se = std::max(st.max_rel_se, std::hypot(se_lib, se_fd) / p_fd);
  st.max_fd_bias = std::max(st.max_fd_bias, bias);
  st.ok = st.ok && rel < 1e-2;
  ++st.triples;
}

// Hard rods: ln Z is the Tonks partition function, so the difference quotient is exact.
FdStats fd_hard_rods() {
  const double lambda = 1.0, R = 0.1;
  const Window<1> window({0.0}, {1.0}, R);
  const auto law = RadiusLaw::delta(R);
  const double eps = 1e-3 * window.volume();
  Rng rng(201);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FdStats st;
  while(st.triples < 20) {
    const double x = 0.9 * u(rng);
    Configuration<1> gamma;
    double left = -kInfinity, right = kInfinity;
    if(u(rng) < 0.5) {
      const double g = 1.0 + 0.3 * u(rng);
      gamma.insert(pt<1>({g}, R));
      right = g - 2 * R;
    }
    if(u(rng) < 0.5) {
      const double g = -0.25 * u(rng) - 1e-3;
      gamma.insert(pt<1>({g}, R));
      left = g + 2 * R;
    }
    Configuration<1> kept;
    double last = left - 2 * R;
    for(double c = std::max(0.0, last + 2 * R) + 0.05 * u(rng); c < x - 2 * R; c += 2 * R + 0.3 * u(rng)) {
      kept.insert(pt<1>({c}, R));
      last = c;
    }
    left = std::max(left, last + 2 * R);
    if(x <= left || x >= right) {
      continue;
    }
    const auto X = pt<1>({x}, R);
    const auto Xp = successor_at_mass(X, eps, law, window);
    const double m = Xp.x(0) - X.x(0);
    const double dlogz = std::log(oracle::tonks_z(lambda, X.x(0), 1.0, R, left, right)) -
                         std::log(oracle::tonks_z(lambda, Xp.x(0), 1.0, R, left, right));
    const double p_fd = (lambda + dlogz / m) / lambda;
    const auto kernel = ThinningKernel<HardSphere<1>, 1>::make({}, lambda, law, window, {}, gamma);
    const auto p = single_point_prob(kernel, X, kept, rng, 200000);
    // Limit of the quotient: the Tonks ratio with X blocking its own rod length.
    const double p_limit = oracle::tonks_z(lambda, X.x(0), 1.0, R, X.x(0) + 2 * R, right) /
                           oracle::tonks_z(lambda, X.x(0), 1.0, R, left, right);
    record(st, p.value, p.std_error, p_fd, 0.0, std::abs(p_fd - p_limit) / p_fd);
  }
  return st;
}

// Strauss and CRCM: ln Z([X,oo)) - ln Z([X+,oo)) from the slab [X, X+) of mass m:
//   Z(X)/Z(X+) = e^{-lambda m} (1 + lambda m E[e^{-h(Y | xi u kept u gamma)}]) + O(m^2),
// the O(m^2) part being the terms with two or more slab points,
// with xi from the Gibbs specification on [X+, oo) (rejection in this file, oracle
// weights) and Y ~ Q* on the slab.
template<typename Model, typename Weight>
FdStats fd_monte_carlo(const Model& model, double lambda, const RadiusLaw& law, double r0, double r1,
                       const Weight& weight, std::uint64_t seed, double eps_factor = 1e-3) {
  const Window<2> window({0, 0}, {1, 1}, 0.15);
  const double alpha = dom_level(model, lambda);
  const double eps = eps_factor * window.volume();
  const std::size_t samples = 200000;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_point = [&](std::array<double, 2> lo, std::array<double, 2> size) {
    const double r = r0 + (r1 - r0) * u(rng);
    return pt<2>({lo[0] + size[0] * u(rng), lo[1] + size[1] * u(rng)}, r);
  };
  FdStats st;
  while(st.triples < 20) {
    const auto X = random_point({0, 0}, {1, 1});
    const OrderKey kx = encode(X, window);
    if(interval_mass(kx, key_end(window), law, window) < 0.2) {
      continue;
    }
    // Boundary balls just outside the right or top edge.
    Configuration<2> gamma;
    const int n_gamma = static_cast<int>(4 * u(rng));
    for(int i = 0; i < n_gamma; ++i) {
      gamma.insert(u(rng) < 0.5 ? random_point({1.0, 0.0}, {0.2, 1.0}) : random_point({0.0, 1.0}, {1.0, 0.2}));
    }
    Configuration<2> kept;
    std::poisson_distribution<int> count(3.0);
    for(int i = count(rng); i > 0; --i) {
      const auto y = random_point({0, 0}, {1, 1});
      if(encode(y, window) < kx) {
        kept.try_insert(y);
      }
    }
    const OrderKey kp = successor_key_at_mass(kx, eps, law, window);
    const double m = interval_mass(kx, kp, law, window);
    const IntervalSampler<2> slab(kx, kp, law, window);
    const auto boundary = balls(merge(gamma, kept));
    std::poisson_distribution<int> proposals(alpha * window.volume());
    RunningStats f, at_x;
    const auto x_ball = balls(Configuration<2>{X})[0];
    for(std::size_t s = 0; s < samples; ++s) {
      std::vector<oracle::Ball<2>> xi;
      while(true) {
        xi.clear();
        for(int i = proposals(rng); i > 0; --i) {
          const auto y = random_point({0, 0}, {1, 1});
          if(!(encode(y, window) < kp)) {
            xi.push_back(balls(Configuration<2>{y})[0]);
          }
        }
        const double accept = std::pow(lambda / alpha, static_cast<double>(xi.size())) * weight(xi, boundary);
        if(u(rng) < accept) {
          break;
        }
      }
      const double w_xi = weight(xi, boundary);
      xi.push_back(x_ball);
      at_x.add(weight(xi, boundary) / w_xi);
      xi.back() = balls(Configuration<2>{slab(rng)})[0];
      f.add(weight(xi, boundary) / w_xi);
    }
    const double p_fd = std::log1p(lambda * m * f.mean()) / (m * alpha);
    const double se_fd = lambda * f.standard_error() / alpha;
    const auto kernel = ThinningKernel<Model, 2>::make(model, lambda, law, window, {}, gamma);
    const auto p = single_point_prob(kernel, X, kept, rng, samples);
    if(p.value < 0.05) {
      continue;
    }
    // Discretisation error of the quotient: slab average against Y = X on the same draws.
    const double p_limit = lambda * at_x.mean() / alpha;
    record(st, p.value, p.std_error, p_fd, se_fd, std::abs(p_fd - p_limit) / p_fd);
  }
  return st;
}

Outcome criterion2() {
  auto strauss_w = [](const auto& w, const auto& g) { return oracle::strauss_weight<2>(w, g, 0.5); };
  const auto rods = fd_hard_rods();
  const auto strauss = fd_monte_carlo(Strauss<2>(0.5), 1.0, RadiusLaw::delta(0.1), 0.1, 0.1, strauss_w, 202);
  const auto crcm = fd_monte_carlo(
      Crcm<2>(2.0), 0.5, RadiusLaw::delta(0.1), 0.1, 0.1,
      [](const auto& w, const auto& g) { return oracle::crcm_weight<2>(w, g, 2.0); }, 203);
  std::string detail;
  const std::vector<std::pair<std::string, FdStats>> all{{"hard rods", rods}, {"Strauss", strauss}, {"CRCM", crcm}};
  for(const auto& [name, st]: all) {
    detail += std::string(detail.empty() ? "" : "; ") + name + ": " + std::to_string(st.triples) +
              " triples, max rel err " + fmt("%.2e", st.max_rel) + ", MC budget " + fmt("%.1e", st.max_rel_se) +
              ", FD budget " + fmt("%.1e", st.max_fd_bias);
  }
  // Not gated: with a spread of radii the slab at 1e-3 covers a wide range of
  // radii, so the quotient is far from its limit; a smaller step recovers it.
  const auto wide = fd_monte_carlo(Strauss<2>(0.5), 1.0, RadiusLaw::uniform(0.05, 0.15), 0.05, 0.15, strauss_w, 204);
  const auto fine =
      fd_monte_carlo(Strauss<2>(0.5), 1.0, RadiusLaw::uniform(0.05, 0.15), 0.05, 0.15, strauss_w, 204, 1e-7);
  detail += "; [info] Strauss uniform(0.05,0.15) radii: max rel err " + fmt("%.2e", wide.max_rel) +
            " at eps=1e-3, " + fmt("%.2e", fine.max_rel) + " at eps=1e-7";
  return {rods.ok && strauss.ok && crcm.ok, detail};
}

// ---------------------------------------------------------------------------
// 3. void probability

Outcome criterion3() {
  const double lambda = 0.5, R = 0.2;
  const Window<1> window({0.0}, {1.0}, R);
  const auto kernel = ThinningKernel<HardSphere<1>, 1>::make({}, lambda, RadiusLaw::delta(R), window);
  Rng rng(301);
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<long> empty(grid.size(), 0), reach(grid.size(), 0);
  for(int i = 0; i < 100000; ++i) {
    const auto r = thin_sample(kernel, rng);
    for(std::size_t g = 0; g < grid.size(); ++g) {
      bool before = false, after = false;
      for(const auto& p: r.kept) {
        (p.x(0) < grid[g] ? before : after) = true;
      }
      if(!before) {
        ++reach[g];
        empty[g] += after ? 0 : 1;
      }
    }
  }
  bool ok = true;
  double worst = 0.0;
  for(std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    const double expected = std::exp(-lambda * (1 - x)) / oracle::tonks_z(lambda, x, 1.0, R, -kInfinity, kInfinity);
    const double f = static_cast<double>(empty[g]) / static_cast<double>(reach[g]);
    const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(reach[g]));
    worst = std::max(worst, std::abs(f - expected) / se);
    ok = ok && std::abs(f - expected) <= 3 * se;
  }
  return {ok, "5 grid points, worst deviation " + fmt("%.2f", worst) + " SE"};
}

// ---------------------------------------------------------------------------
// 4 and 6. structural invariants, termination, depth tail

struct CouplingBatch {
  std::size_t violations{0};
  std::size_t aborted{0};
  std::vector<std::size_t> thin2_layers;
};

template<typename Model>
CouplingBatch coupling_batch(const Model& model, double lambda, std::uint64_t seed, std::size_t reps) {
  const Window<2> window({-0.5, -0.5}, {0.5, 0.5}, 0.15);
  const auto law = RadiusLaw::uniform(0.05, 0.15);
  const auto g1 = dense_grid_boundary<2>(0.5, 0.15, 0.1, 0.2);
  const Configuration<2> g2{pt<2>({-0.6, 0.1}, 0.12), pt<2>({0.2, 0.58}, 0.1), pt<2>({0.55, -0.3}, 0.15)};
  const double alpha = dom_level(model, lambda);
  CouplingBatch out;
  for(std::size_t rep = 0; rep < reps; ++rep) {
    try {
      const auto s = disagreement_sample(model, lambda, alpha, law, window, g1, g2, seed, rep);
      out.violations += verify_disagreement(s).ok() ? 0 : 1;
      out.thin2_layers.push_back(s.depth() - 1);
    } catch(const DepthCapExceeded&) {
      ++out.aborted;
    }
  }
  return out;
}

// Smallest one-sided p-value of P(#thin2 layers >= t) <= rho^{t-1} over t >= 2.
double depth_tail_p(const std::vector<std::size_t>& layers, double rho) {
  double worst = 1.0;
  const std::size_t top = layers.empty() ? 0 : *std::max_element(layers.begin(), layers.end());
  for(std::size_t t = 2; t <= top; ++t) {
    const auto hits = static_cast<std::size_t>(
        std::count_if(layers.begin(), layers.end(), [&](std::size_t k) { return k >= t; }));
    worst = std::min(worst, binomial_upper_tail(hits, layers.size(), std::pow(rho, static_cast<double>(t - 1))));
  }
  return worst;
}

// Shared by criteria 4 and 6.
const std::vector<CouplingBatch>& batches() {
  static const std::vector<CouplingBatch> b{coupling_batch(HardSphere<2>{}, 1.0, 401, 10000),
                                            coupling_batch(Strauss<2>(0.5), 1.0, 402, 10000),
                                            coupling_batch(Crcm<2>(2.0), 0.5, 403, 10000)};
  return b;
}

Outcome criterion4() {
  const auto& g_batches = batches();
  std::size_t v = 0;
  std::string detail;
  const char* names[] = {"hard-sphere", "Strauss", "CRCM"};
  for(std::size_t i = 0; i < 3; ++i) {
    v += g_batches[i].violations + g_batches[i].aborted;
    detail += std::string(i ? ", " : "") + names[i] + " " + std::to_string(g_batches[i].violations);
  }
  return {v == 0, "violations over 1e4 runs each: " + detail};
}

Outcome criterion6() {
  const auto& g_batches = batches();
  bool ok = true;
  std::string detail;
  // The 2-D batches of criterion 4: window mass 1, alpha = dom level.
  const double alphas[] = {1.0, 1.0, 1.0};
  for(std::size_t i = 0; i < g_batches.size(); ++i) {
    const double rho = 1 - std::exp(-alphas[i] * 1.0);
    const double p = depth_tail_p(g_batches[i].thin2_layers, rho);
    const auto top = *std::max_element(g_batches[i].thin2_layers.begin(), g_batches[i].thin2_layers.end());
    ok = ok && g_batches[i].aborted == 0 && p > 0.01;
    detail += "max thin2 layers " + std::to_string(top) + " tail p=" + fmt("%.3f", p) + "; ";
  }
  // A 1-D case with many layers.
  const Window<1> window({0.0}, {1.0}, 0.1);
  const auto law = RadiusLaw::delta(0.1);
  const Configuration<1> g1{pt<1>({-0.05}, 0.1)};
  const Configuration<1> g2{pt<1>({1.05}, 0.1)};
  const double alpha = 2.0;
  std::vector<std::size_t> layers;
  std::size_t aborted = 0;
  for(std::size_t rep = 0; rep < 20000; ++rep) {
    try {
      layers.push_back(disagreement_sample(Strauss<1>(1.0), alpha, alpha, law, window, g1, g2, 601, rep).depth() - 1);
    } catch(const DepthCapExceeded&) {
      ++aborted;
    }
  }
  const double p = depth_tail_p(layers, 1 - std::exp(-alpha));
  ok = ok && aborted == 0 && p > 0.01;
  detail += "1-D Strauss max " + std::to_string(*std::max_element(layers.begin(), layers.end())) +
            " tail p=" + fmt("%.3f", p);
  // The cap itself.
  CouplingOptions capped;
  capped.depth_cap = 1;
  bool threw = false;
  try {
    disagreement_sample(Strauss<1>(1.0), alpha, alpha, law, window, g1, g2, 601, 0, capped);
  } catch(const DepthCapExceeded&) {
    threw = true;
  }
  ok = ok && threw;
  return {ok, detail + (threw ? "; cap 1 aborts" : "; cap 1 NOT enforced")};
}

// ---------------------------------------------------------------------------
// 5. coupling marginals

Outcome criterion5() {
  const Window<2> window({-0.5, -0.5}, {0.5, 0.5}, 0.15);
  const auto law = RadiusLaw::uniform(0.05, 0.15);
  const auto g1 = dense_grid_boundary<2>(0.5, 0.15, 0.1, 0.2);
  const Configuration<2> g2{pt<2>({-0.6, 0.1}, 0.12)};
  const double lambda = 1.5;
  const Strauss<2> model(0.5);
  const double alpha = dom_level(model, lambda);
  const Context<2> c1(g1, window), c2(g2, window);
  Rng rng(501);
  std::vector<long> n1, n2, n3, r1, r2;
  std::vector<double> nn1, nn2, nr1, nr2;
  for(std::uint64_t rep = 0; rep < 20000; ++rep) {
    const auto s = disagreement_sample(model, lambda, alpha, law, window, g1, g2, 501, rep);
    n1.push_back(static_cast<long>(s.xi1.size()));
    n2.push_back(static_cast<long>(s.xi2.size()));
    n3.push_back(static_cast<long>(s.xi3.size()));
    nn_distances(s.xi1, nn1);
    nn_distances(s.xi2, nn2);
    const auto o1 = gibbs_rejection_sample(model, lambda, OrderInterval<2>{}, c1, law, window, alpha, rng);
    const auto o2 = gibbs_rejection_sample(model, lambda, OrderInterval<2>{}, c2, law, window, alpha, rng);
    r1.push_back(static_cast<long>(o1.size()));
    r2.push_back(static_cast<long>(o2.size()));
    nn_distances(o1, nr1);
    nn_distances(o2, nr2);
  }
  const double mean = alpha * window.volume();
  const double p[] = {chi_square_two_sample(n1, r1).p_value, chi_square_two_sample(n2, r2).p_value,
                      ks_two_sample(nn1, nr1).p_value, ks_two_sample(nn2, nr2).p_value,
                      chi_square_gof(n3, [&](long k) { return poisson_pmf(static_cast<int>(k), mean); }).p_value};
  bool ok = true;
  for(const double v: p) {
    ok = ok && v > 0.01;
  }
  return {ok, "Strauss 2-D, 2e4 runs: counts p=" + fmt("%.3f", p[0]) + "/" + fmt("%.3f", p[1]) +
                  ", NN KS p=" + fmt("%.3f", p[2]) + "/" + fmt("%.3f", p[3]) + ", xi3 Poisson p=" + fmt("%.3f", p[4])};
}

// ---------------------------------------------------------------------------
// 7. order module

template<int D>
bool roundtrip(int frac_bits, std::uint64_t seed) {
  std::array<double, D> lo{}, hi{};
  lo.fill(-1.0);
  hi.fill(2.0);
  const Window<D> window(lo, hi, 0.75, frac_bits);
  Rng rng(seed);
  const auto law = RadiusLaw::uniform(0.0, 0.75);
  for(int i = 0; i < 10000; ++i) {
    const auto p = sample_uniform_point(window, law, rng);
    if(!(decode(encode(p, window), window) == p)) {
      return false;
    }
  }
  return true;
}

// Every aligned hyperblock of the W=4 grid is one contiguous key block, and back.
template<int D>
bool bijection() {
  constexpr int W = 4;
  constexpr int m = D + 1;
  std::array<double, D> lo{}, hi{};
  hi.fill(1.0);
  const Window<D> window(lo, hi, 15.0 / 16.0, W);
  for(int n = 0; n <= W; ++n) {
    const int side = 1 << (W - n);
    const int per_axis = 1 << n;
    std::array<int, m> b{};
    while(true) {
      std::vector<OrderKey> keys;
      std::array<int, m> c{};
      while(true) {
        std::array<double, D> x{};
        for(int i = 0; i < D; ++i) {
          x[i] = (b[i] * side + c[i]) / 16.0;
        }
        const auto p = Point<D>::from_double(x, (b[D] * side + c[D]) / 16.0);
        keys.push_back(encode(p, window));
        if(!(decode(keys.back(), window) == p)) {
          return false;
        }
        int i = 0;
        while(i < m && ++c[i] == side) {
          c[i] = 0;
          ++i;
        }
        if(i == m) {
          break;
        }
      }
      std::sort(keys.begin(), keys.end());
      const std::uint64_t expected = std::uint64_t{1} << ((W - n) * m);
      if(keys.size() != expected || !(keys.back() - keys.front() == OrderKey(expected - 1))) {
        return false;
      }
      const auto parts = decompose(keys.front(), keys.back().next(), key_bits(window));
      if(parts.size() != 1 || parts[0].free_bits != (W - n) * m) {
        return false;
      }
      int i = 0;
      while(i < m && ++b[i] == per_axis) {
        b[i] = 0;
        ++i;
      }
      if(i == m) {
        break;
      }
    }
  }
  return true;
}

Outcome criterion7() {
  bool ok = true;
  for(const int w: {4, 8, 16, 32}) {
    ok = ok && roundtrip<1>(w, 700 + w) && roundtrip<2>(w, 710 + w) && roundtrip<3>(w, 720 + w);
  }
  const bool bij = bijection<1>() && bijection<2>() && bijection<3>();
  return {ok && bij, std::string("round trip 1e4 points x 12 cases ") + (ok ? "exact" : "FAILED") +
                         ", W=4 bijection m=2,3,4 " + (bij ? "exact" : "FAILED")};
}

// ---------------------------------------------------------------------------
// 8. percolation

Outcome criterion8() {
  const auto law = RadiusLaw::delta(0.5);
  const std::vector<double> alphas{0.0, 0.4, 0.8, 1.2};
  const std::vector<double> distances{1, 2, 3, 4, 5, 6};
  const auto rows = connection_sweep<2>(alphas, distances, law, 20000, 801, 16);
  bool zero = true, monotone = true;
  for(std::size_t a = 0; a < alphas.size(); ++a) {
    for(std::size_t k = 0; k < distances.size(); ++k) {
      const auto& row = rows[a * distances.size() + k];
      if(a == 0) {
        zero = zero && row.p == 0.0 && row.se == 0.0;
      } else {
        monotone = monotone && row.p >= rows[(a - 1) * distances.size() + k].p;
      }
      if(k > 0) {
        monotone = monotone && row.p <= rows[a * distances.size() + k - 1].p;
      }
    }
  }
  std::vector<DecayRow> table;
  for(std::size_t k = 0; k < distances.size(); ++k) {
    const auto& row = rows[2 * distances.size() + k];
    table.push_back({row.distance, row.p, row.se});
  }
  const auto fit = fit_decay(table);
  // Upsilon_k with a delta law holds on every sample at k = R.
  const Window<2> window({-4, -4}, {4, 4}, 0.5);
  Rng rng(802);
  bool upsilon = true;
  for(int i = 0; i < 2000 && upsilon; ++i) {
    upsilon = upsilon_holds(sample_poisson(window, 2.0, law, rng), 0.5);
  }
  const auto k = find_k(2.0, law, window, 0.0, 500, rng);
  upsilon = upsilon && k.reached && k.k <= 0.5 + 1e-9 && k.p_hat == 1.0;
  return {zero && monotone && fit.r_squared > 0.9 && upsilon,
          std::string("alpha=0 ") + (zero ? "exact 0" : "NONZERO") + ", shared-draw monotonicity " +
              (monotone ? "exact" : "BROKEN") + ", alpha=0.8 fit kappa=" + fmt("%.3f", fit.kappa) +
              " R^2=" + fmt("%.4f", fit.r_squared) + ", Upsilon at k=R " + (upsilon ? "holds" : "FAILS")};
}

// ---------------------------------------------------------------------------
// 9. disagreement percolation inequality and uniqueness scan

Outcome criterion9() {
  const auto law = RadiusLaw::delta(0.1);
  const auto inner = BoxProbe<2>::from_double({-0.2, -0.2}, {0.2, 0.2});
  const Event<2> nonempty = [](const Configuration<2>& c) { return !c.empty(); };
  bool ok = true;
  double worst = -kInfinity;
  std::uint64_t seed = 901;
  for(const double lambda: {0.2, 0.4, 0.6}) {
    for(const double half: {0.6, 0.8, 1.0}) {
      const Window<2> window({-half, -half}, {half, half}, 0.1);
      const auto g = dense_grid_boundary<2>(half, 0.1, 0.1, 0.2);
      const auto r =
          boundary_influence(Crcm<2>(2.0), lambda, law, window, inner, g, Configuration<2>{}, nonempty, 5000, seed++);
      ok = ok && r.holds;
      worst = std::max(worst, (r.direct_gap - r.percolation_bound) / std::hypot(r.gap_se, r.bound_se));
    }
  }
  auto library = [](double n) {
    return std::vector<Configuration<2>>{Configuration<2>{}, dense_grid_boundary<2>(n, 0.1, 0.1, 0.2),
                                         dense_grid_boundary<2>(n, 0.1, 0.1, 0.4)};
  };
  const auto rows = uniqueness_scan(Crcm<2>(2.0), 0.3, law, inner, nonempty, {0.4, 0.7, 1.0}, 5000, 902,
                                    std::function<std::vector<Configuration<2>>(double)>(library));
  const auto& last = rows.back();
  std::string scan;
  for(const auto& row: rows) {
    scan += " n=" + fmt("%.1f", row.n) + ":" + fmt("%.4f", row.gap) + "+-" + fmt("%.4f", row.se);
  }
  return {ok && last.below_two_se, "3x3 grid holds=" + std::string(ok ? "yes" : "NO") +
                                       " (max (gap-bound)/SE " + fmt("%.2f", worst) + "); gap(n):" + scan};
}

// ---------------------------------------------------------------------------
// 10. CLI determinism

Outcome criterion10() {
  using namespace gibbsdp::cli;
  auto load = [](const std::string& name) {
    std::ifstream in(std::string(GIBBSDP_DEMO_DIR) + "/" + name);
    std::stringstream s;
    s << in.rdbuf();
    return parse_config_text(s.str());
  };
  RunConfig decay;
  decay.dimension = 1;
  decay.model.name = "hard_sphere";
  decay.model.lambda = 0.5;
  decay.window = {{0.0}, {12.0}, 0.5, 32};
  decay.radius_law.kind = "delta";
  decay.radius_law.r = 0.5;
  decay.replicates = 2000;
  decay.decay = {{3.0}, {4.0}, {1, 2, 3, 4}};
  auto verify = load("strauss_verify_2d.json");
  verify.replicates = 300;
  const std::vector<std::pair<std::string, RunConfig>> runs{
      {"sample", load("hard_rods_1d.json")},     {"thin", load("hard_rods_1d.json")},
      {"couple", load("crcm_couple_2d.json")},   {"percolate", load("percolation_2d.json")},
      {"decay", decay},                          {"verify", verify}};
  bool ok = true;
  std::string detail;
  for(auto [command, config]: runs) {
    for(const Format f: {Format::jsonl, Format::csv}) {
      std::string outs[3];
      for(int i = 0; i < 3; ++i) {
        config.threads = i == 2 ? 4 : 1;
        std::ostringstream os;
        run_command(command, config, os, f);
        outs[i] = os.str();
      }
      const bool same = !outs[0].empty() && outs[0] == outs[1] && outs[0] == outs[2];
      ok = ok && same;
      if(!same) {
        detail += " " + command + (f == Format::csv ? "/csv" : "/jsonl") + " differs";
      }
    }
  }
  return {ok, "6 commands x 2 formats, two serial runs and one 4-thread run" + (ok ? ": byte-identical" : detail)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<std::size_t> selected;
  for(int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if(k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: acceptance [criterion 1..%zu]...\n", criteria.size());
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(k - 1));
  }
  if(selected.empty()) {
    for(std::size_t i = 0; i < criteria.size(); ++i) {
      selected.push_back(i);
    }
  }
  int failed = 0;
  for(const std::size_t i: selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[i]();
    } catch(const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s  %s  [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  if(selected.size() > 1) {
    std::printf("%d of %zu criteria passed\n", static_cast<int>(selected.size()) - failed, selected.size());
  }
  return failed == 0 ? 0 : 1;
}
