#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "gibbsdp/models.hpp"
#include "gibbsdp/partition.hpp"
#include "gibbsdp/poisson.hpp"
#include "gibbsdp/rng.hpp"
#include "oracles/oracles.hpp"

using namespace gibbsdp;

namespace {

template<int D>
Point<D> pt(std::array<double, D> x, double r) {
  return Point<D>::from_double(x, r);
}

template<int D>
std::vector<oracle::Ball<D>> to_balls(const Configuration<D>& omega) {
  std::vector<oracle::Ball<D>> out;
  for(const auto& p: omega) {
    oracle::Ball<D> b;
    for(int i = 0; i < D; ++i) {
      b.x[i] = p.x(i);
    }
    b.r = p.r();
    out.push_back(b);
  }
  return out;
}

Configuration<2> random_config(Rng& rng, int max_points, double lo, double hi, double r_lo, double r_hi) {
  std::uniform_real_distribution<double> u(lo, hi), r(r_lo, r_hi);
  std::uniform_int_distribution<int> n(0, max_points);
  Configuration<2> c;
  const int k = n(rng);
  for(int i = 0; i < k; ++i) {
    c.try_insert(pt<2>({u(rng), u(rng)}, r(rng)));
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// local energies

TEST(Models, LocalEnergyOnEmptyContext) {
  const auto x = pt<2>({0.5, 0.5}, 0.1);
  EXPECT_EQ(local_energy(HardSphere<2>{}, x, Configuration<2>{}), 0.0);
  EXPECT_DOUBLE_EQ(local_energy(Crcm<2>(2.0), x, Configuration<2>{}), -std::log(2.0));
  EXPECT_EQ(local_energy(Strauss<2>(1.0), x, Configuration<2>{}), 0.0);
}

TEST(Models, CrcmBridgeCostsLogQ) {
  const Configuration<2> omega{pt<2>({0.0, 0.0}, 0.1), pt<2>({0.4, 0.0}, 0.1)};
  const auto bridge = pt<2>({0.2, 0.0}, 0.1);
  EXPECT_EQ(k_components(bridge, omega), 2u);
  EXPECT_NEAR(local_energy(Crcm<2>(2.0), bridge, omega), std::log(2.0), 1e-15);
}

TEST(Models, StraussCountsOverlaps) {
  const Configuration<2> omega{pt<2>({0.1, 0.0}, 0.1), pt<2>({-0.1, 0.0}, 0.1), pt<2>({0.0, 0.1}, 0.1),
                               pt<2>({0.0, 0.9}, 0.1)};
  EXPECT_DOUBLE_EQ(local_energy(Strauss<2>(1.0), pt<2>({0.0, 0.0}, 0.05), omega), 3.0);
}

TEST(Models, LocalEnergyRejectsMember) {
  const Configuration<2> omega{pt<2>({0.1, 0.0}, 0.1)};
  EXPECT_THROW(local_energy(HardSphere<2>{}, omega[0], omega), std::invalid_argument);
  EXPECT_THROW(k_components(omega[0], omega), std::invalid_argument);
}

TEST(Models, ParameterDomains) {
  EXPECT_THROW(Strauss<2>(-0.1), std::invalid_argument);
  EXPECT_THROW(Crcm<2>(0.0), std::invalid_argument);
  EXPECT_THROW(dom_level(Crcm<2>(0.5), 1.0), DomViolation);
  EXPECT_THROW(dom_level(HardSphere<2>{}, -1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// hamiltonian

TEST(Models, HamiltonianOfEmptyIsZero) {
  const Window<2> window({0, 0}, {1, 1}, 0.2);
  const Configuration<2> gamma{pt<2>({1.1, 0.5}, 0.2), pt<2>({-0.1, 0.5}, 0.1)};
  EXPECT_EQ(hamiltonian(HardSphere<2>{}, window, Configuration<2>{}, gamma), 0.0);
  EXPECT_EQ(hamiltonian(Strauss<2>(0.5), window, Configuration<2>{}, gamma), 0.0);
  EXPECT_EQ(hamiltonian(Crcm<2>(2.0), window, Configuration<2>{}, gamma), 0.0);
  EXPECT_EQ(hamiltonian(AreaInteraction<2>{0.7, 0.0, 0.2, {}}, window, Configuration<2>{}, gamma), 0.0);
}

TEST(Models, HardSphereOverlapIsInfinite) {
  const Window<2> window({0, 0}, {1, 1}, 0.2);
  const Configuration<2> omega{pt<2>({0.5, 0.5}, 0.1), pt<2>({0.6, 0.5}, 0.1)};
  EXPECT_EQ(hamiltonian(HardSphere<2>{}, window, omega, Configuration<2>{}), kInfinity);
  EXPECT_EQ(boltzmann(HardSphere<2>{}, omega.span(), Context<2>{}), 0.0);
}

TEST(Models, CrcmTwoDisjointBalls) {
  const Window<2> window({0, 0}, {1, 1}, 0.2);
  const Configuration<2> omega{pt<2>({0.2, 0.2}, 0.1), pt<2>({0.8, 0.8}, 0.1)};
  const double h = hamiltonian(Crcm<2>(2.0), window, omega, Configuration<2>{});
  EXPECT_NEAR(h, -2 * std::log(2.0), 1e-15);
  EXPECT_NEAR(std::exp(-h), oracle::crcm_weight<2>(to_balls(omega), {}, 2.0), 1e-12);
  EXPECT_THROW(hamiltonian(Crcm<2>(2.0), window, omega, omega), std::invalid_argument);
}

TEST(Models, KComponentsExamples) {
  const auto x = pt<2>({0.5, 0.5}, 0.1);
  EXPECT_EQ(k_components(x, Configuration<2>{}), 0u);
  EXPECT_EQ(k_components(x, Configuration<2>{pt<2>({0.6, 0.5}, 0.05)}), 1u);
  // Two chains of two balls on either side.
  const Configuration<2> chains{pt<2>({0.0, 0.5}, 0.1), pt<2>({0.15, 0.5}, 0.1), pt<2>({0.85, 0.5}, 0.1),
                                pt<2>({1.0, 0.5}, 0.1)};
  const auto bridge = pt<2>({0.5, 0.5}, 0.3);
  EXPECT_EQ(k_components(bridge, chains), 2u);
  auto balls = to_balls(chains);
  const auto before = oracle::bfs_components<2>(balls);
  balls.push_back(to_balls(Configuration<2>{bridge})[0]);
  EXPECT_EQ(before + 1 - oracle::bfs_components<2>(balls), 2u);
}

TEST(Models, KComponentsMatchesBfsOracle) {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0, 1), r(0.02, 0.2);
  for(int trial = 0; trial < 2000; ++trial) {
    const auto omega = random_config(rng, 10, 0, 1, 0.02, 0.2);
    const auto x = pt<2>({u(rng), u(rng)}, r(rng));
    if(omega.contains(x)) {
      continue;
    }
    auto balls = to_balls(omega);
    const auto before = oracle::bfs_components<2>(balls);
    balls.push_back(to_balls(Configuration<2>{x})[0]);
    ASSERT_EQ(k_components(x, omega), before + 1 - oracle::bfs_components<2>(balls));
  }
}

TEST(Models, EnergiesMatchIndependentWeights) {
  Rng rng(19);
  for(int trial = 0; trial < 2000; ++trial) {
    const auto omega = random_config(rng, 8, 0, 1, 0.02, 0.2);
    auto gamma = random_config(rng, 5, 1.0, 1.3, 0.02, 0.2);
    const auto bo = to_balls(omega);
    const auto bg = to_balls(gamma);
    ASSERT_NEAR(boltzmann(Crcm<2>(2.0), omega.span(), Context<2>(gamma)), oracle::crcm_weight<2>(bo, bg, 2.0), 1e-9);
    ASSERT_NEAR(boltzmann(Crcm<2>(3.5), omega.span(), Context<2>(gamma)), oracle::crcm_weight<2>(bo, bg, 3.5), 1e-9);
    ASSERT_NEAR(boltzmann(Strauss<2>(0.7), omega.span(), Context<2>(gamma)), oracle::strauss_weight<2>(bo, bg, 0.7),
                1e-12);
    ASSERT_EQ(boltzmann(HardSphere<2>{}, omega.span(), Context<2>(gamma)), oracle::hard_weight<2>(bo, bg));
  }
}

TEST(Models, CrcmWeightIsQToComponentCount) {
  // e^{-H(omega | empty)} against a direct component count on small configurations.
  Rng rng(23);
  for(int trial = 0; trial < 2000; ++trial) {
    const auto omega = random_config(rng, 8, 0, 1, 0.05, 0.25);
    const double c = static_cast<double>(oracle::bfs_components<2>(to_balls(omega)));
    ASSERT_NEAR(std::exp(-energy(Crcm<2>(2.0), omega, Configuration<2>{})), std::pow(2.0, c), 1e-9);
  }
}

template<typename Model>
void check_additivity(const Model& model, std::uint64_t seed, double tol) {
  const Window<2> window({0, 0}, {1, 1}, 0.2);
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  for(int trial = 0; trial < 500; ++trial) {
    const auto omega = random_config(rng, 8, 0, 1, 0.02, 0.2);
    const auto gamma = random_config(rng, 4, 1.0, 1.2, 0.02, 0.2);
    Configuration<2> a, b;
    for(const auto& p: omega) {
      (coin(rng) ? a : b).insert(p);
    }
    const double whole = hamiltonian(model, window, omega, gamma);
    const double split = hamiltonian(model, window, a, merge(gamma, b)) + hamiltonian(model, window, b, gamma);
    if(std::isinf(whole)) {
      ASSERT_TRUE(std::isinf(split));
    } else {
      ASSERT_NEAR(whole, split, tol);
    }
    // Same total in a random insertion order.
    std::vector<Point<2>> perm(omega.begin(), omega.end());
    std::shuffle(perm.begin(), perm.end(), rng);
    Configuration<2> ctx = gamma;
    double total = 0.0;
    for(const auto& p: perm) {
      total += local_energy(model, p, ctx);
      ctx.insert(p);
    }
    if(std::isinf(whole)) {
      ASSERT_TRUE(std::isinf(total));
    } else {
      ASSERT_NEAR(whole, total, tol);
    }
  }
}

TEST(Models, AdditivityAndOrderInvariance) {
  check_additivity(HardSphere<2>{}, 1, 1e-9);
  check_additivity(Strauss<2>(0.8), 2, 1e-9);
  check_additivity(Crcm<2>(2.0), 3, 1e-9);
  check_additivity(AreaInteraction<2>{1.3, 0.0, 0.2, {}}, 4, 1e-9);
  check_additivity(AreaInteraction<2>{-0.4, 0.2, 0.2, -1.0}, 5, 1e-9);
}

TEST(Models, EnergyNeverBelowHmin) {
  Rng rng(29);
  std::uniform_real_distribution<double> u(0, 1), r(0.0, 0.2);
  const Crcm<2> crcm(2.0);
  const Strauss<2> strauss(0.5);
  const AreaInteraction<2> area{-2.0, 0.0, 0.2, {}};
  for(int trial = 0; trial < 100000; ++trial) {
    const auto omega = random_config(rng, 6, 0, 1, 0.0, 0.2);
    const auto x = pt<2>({u(rng), u(rng)}, r(rng));
    if(omega.contains(x)) {
      continue;
    }
    ASSERT_GE(local_energy(crcm, x, omega), crcm.h_min() - 1e-12);
    ASSERT_GE(local_energy(strauss, x, omega), 0.0);
    ASSERT_GE(local_energy(HardSphere<2>{}, x, omega), 0.0);
    if(trial % 10 == 0) {
      ASSERT_GE(local_energy(area, x, omega), area.h_min() - 1e-12);
    }
  }
}

TEST(Models, DomLevelExamples) {
  EXPECT_DOUBLE_EQ(dom_level(Crcm<2>(2.0), 0.3), 0.6);
  EXPECT_DOUBLE_EQ(dom_level(HardSphere<2>{}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(dom_level(Strauss<2>(0.5), 0.7), 0.7);
  const AreaInteraction<2> attractive{-1.0, 0.0, 0.2, {}};
  EXPECT_NEAR(dom_level(attractive, 1.0), std::exp(std::numbers::pi * 0.04), 1e-12);
}

TEST(Models, CheckLocExamples) {
  Rng rng(31);
  for(int trial = 0; trial < 300; ++trial) {
    const auto omega = random_config(rng, 6, 0, 1, 0.02, 0.1);
    const auto far = random_config(rng, 6, 5, 6, 0.02, 0.1);
    EXPECT_TRUE(check_loc(HardSphere<2>{}, omega, far));
    EXPECT_TRUE(check_loc(Strauss<2>(1.0), omega, far));
    EXPECT_TRUE(check_loc(Crcm<2>(2.0), omega, far));
    EXPECT_TRUE(check_loc(AreaInteraction<2>{0.5, 0.0, 0.1, {}}, omega, far));
  }
  // Disconnected but within reach of the window: CRCM boundary far from omega's balls.
  const Configuration<2> omega{pt<2>({0.2, 0.2}, 0.1)};
  const Configuration<2> gamma{pt<2>({1.05, 0.9}, 0.1), pt<2>({1.2, 0.9}, 0.1)};
  EXPECT_TRUE(check_loc(Crcm<2>(2.0), omega, gamma));
  EXPECT_TRUE(check_loc(HardSphere<2>{}, omega, gamma));
  // A touching boundary does change the energy.
  const Configuration<2> touching{pt<2>({0.35, 0.2}, 0.1)};
  EXPECT_FALSE(check_loc(Crcm<2>(2.0), omega, touching));
}

// ---------------------------------------------------------------------------
// planar geometry

TEST(Area, ClosedFormCases) {
  Rng rng(1);
  const auto x = pt<2>({0.0, 0.0}, 0.5);
  EXPECT_DOUBLE_EQ(area_variation(x, Configuration<2>{}, 10, rng).value, std::numbers::pi * 0.25);
  EXPECT_DOUBLE_EQ(area_variation(x, Configuration<2>{pt<2>({0.1, 0.0}, 1.0)}, 10, rng).value, 0.0);
  EXPECT_THROW(area_variation(x, Configuration<2>{}, 0, rng), std::invalid_argument);
}

TEST(Area, MonteCarloLensComplement) {
  Rng rng(2);
  const auto x = pt<2>({0.0, 0.0}, 1.0);
  const Configuration<2> omega{pt<2>({1.0, 0.0}, 1.0)};
  const double exact = std::numbers::pi - oracle::lens(1.0, 1.0, 1.0);
  const auto mc = area_variation(x, omega, 1000000, rng, true);
  EXPECT_LT(std::abs(mc.value - exact) / exact, 1e-2);
  EXPECT_NEAR(lens_area(1.0, 1.0, 1.0), oracle::lens(1.0, 1.0, 1.0), 1e-12);
  EXPECT_NEAR(lens_area(0.3, 0.7, 0.5), oracle::lens(0.3, 0.7, 0.5), 1e-12);
}

TEST(Area, UnionMatchesGridIntegration) {
  const std::vector<Disk> disks{{0.0, 0.0, 0.5}, {0.6, 0.1, 0.4}, {0.3, 0.5, 0.3}, {2.0, 2.0, 0.2}};
  const auto u = disk_union(disks);
  // Midpoint rule on a fine grid.
  const int n = 3000;
  const double lo = -0.6, hi = 2.3, h = (hi - lo) / n;
  long inside = 0;
  for(int i = 0; i < n; ++i) {
    for(int j = 0; j < n; ++j) {
      const double px = lo + (i + 0.5) * h, py = lo + (j + 0.5) * h;
      for(const auto& d: disks) {
        if((px - d.x) * (px - d.x) + (py - d.y) * (py - d.y) <= d.r * d.r) {
          ++inside;
          break;
        }
      }
    }
  }
  EXPECT_NEAR(u.area, inside * h * h, 2e-3);
  // Two disjoint disks: plain sums.
  const std::vector<Disk> apart{{0, 0, 1}, {3, 0, 0.5}};
  const auto v = disk_union(apart);
  EXPECT_NEAR(v.area, std::numbers::pi * 1.25, 1e-12);
  EXPECT_NEAR(v.perimeter, 2 * std::numbers::pi * 1.5, 1e-12);
}

TEST(Area, EnergyOfSinglePointIsThetaTimesUncoveredArea) {
  Rng rng(4);
  const AreaInteraction<2> model{0.8, 0.0, 0.3, {}};
  for(int trial = 0; trial < 200; ++trial) {
    const auto omega = random_config(rng, 1, 0, 1, 0.05, 0.3);
    std::uniform_real_distribution<double> u(0, 1), r(0.05, 0.3);
    const auto x = pt<2>({u(rng), u(rng)}, r(rng));
    if(omega.contains(x)) {
      continue;
    }
    ASSERT_NEAR(local_energy(model, x, omega), 0.8 * area_variation(x, omega, 1, rng).value, 1e-9);
  }
}

// ---------------------------------------------------------------------------
// partition functions and rejection sampling

TEST(Partition, FreeModelIsOne) {
  const Window<2> window({0, 0}, {1, 1}, 0.1);
  Rng rng(1);
  for(const double lambda: {0.1, 1.0, 3.0}) {
    const auto z = z_bruteforce(FreeModel<2>{}, lambda, OrderInterval<2>{}, Configuration<2>{},
                                RadiusLaw::delta(0.1), window, default_n_max(lambda, lambda, 1.0, 1e-9), 1000, rng);
    EXPECT_NEAR(z.value, 1.0, z.truncation_error + 1e-12);
    EXPECT_EQ(z.mc_error, 0.0);
  }
}

TEST(Partition, BoundedBelowByEmptyTerm) {
  const Window<2> window({0, 0}, {1, 1}, 0.2);
  Rng rng(2);
  const auto law = RadiusLaw::uniform(0.1, 0.2);
  for(const double lambda: {0.5, 2.0}) {
    const auto z = z_bruteforce(HardSphere<2>{}, lambda, OrderInterval<2>{}, Configuration<2>{}, law, window,
                                default_n_max(lambda, lambda, 1.0), 20000, rng);
    EXPECT_GE(z.value, std::exp(-lambda));
    EXPECT_GE(z.truncation_error, 0.0);
    EXPECT_GE(z.mc_error, 0.0);
  }
  EXPECT_THROW(z_bruteforce(HardSphere<2>{}, 2.0, OrderInterval<2>{}, Configuration<2>{}, law, window, 2, 100, rng,
                            1e-6),
               std::invalid_argument);
}

TEST(Partition, TonksDualOracle) {
  // Hard rods of half-length 0.25 on [0, 1), lambda = 1.
  const Window<1> window({0.0}, {1.0}, 0.25);
  const auto law = RadiusLaw::delta(0.25);
  Rng rng(3);
  const auto z = z_bruteforce(HardSphere<1>{}, 1.0, OrderInterval<1>{}, Configuration<1>{}, law, window,
                              default_n_max(1.0, 1.0, 1.0, 1e-9), 400000, rng);
  RejectionStats stats;
  for(int i = 0; i < 200000; ++i) {
    gibbs_rejection_sample(HardSphere<1>{}, 1.0, OrderInterval<1>{}, Configuration<1>{}, law, window, rng, &stats);
  }
  const auto za = z_from_acceptance(stats, 1.0, 1.0, 1.0);
  const double combined = std::hypot(z.total_error(), za.std_error);
  EXPECT_NEAR(z.value, za.value, 3 * combined);
  const double exact = oracle::tonks_z(1.0, 0.0, 1.0, 0.25, -kInfinity, kInfinity);
  EXPECT_NEAR(exact, std::exp(-1.0) * 2.125, 1e-12);
  EXPECT_NEAR(z.value, exact, 3 * z.total_error());
  EXPECT_NEAR(za.value, exact, 3 * za.std_error);
}

TEST(Partition, DualOracleAcrossModels) {
  const Window<2> window({0, 0}, {1, 1}, 0.2);
  const auto law = RadiusLaw::uniform(0.1, 0.2);
  const Configuration<2> gamma{pt<2>({1.1, 0.5}, 0.15), pt<2>({0.5, -0.1}, 0.15)};
  Rng rng(5);
  auto run = [&](const auto& model, double lambda) {
    const double alpha = dom_level(model, lambda);
    const auto z = z_bruteforce(model, lambda, OrderInterval<2>{}, gamma, law, window,
                                default_n_max(lambda, alpha, 1.0, 1e-7), 200000, rng);
    RejectionStats stats;
    const Context<2> ctx(gamma, window);
    for(int i = 0; i < 100000; ++i) {
      gibbs_rejection_sample(model, lambda, OrderInterval<2>{}, ctx, law, window, alpha, rng, &stats);
    }
    const auto za = z_from_acceptance(stats, lambda, alpha, 1.0);
    EXPECT_NEAR(z.value, za.value, 3 * std::hypot(z.total_error(), za.std_error)) << model.name() << " " << lambda;
  };
  run(HardSphere<2>{}, 1.0);
  run(Strauss<2>(0.5), 1.5);
  run(Crcm<2>(2.0), 0.5);
  run(AreaInteraction<2>{2.0, 0.0, 0.2, {}}, 1.0);
}

TEST(Partition, HardSphereMonotoneInDomain) {
  const Window<1> window({0.0}, {2.0}, 0.1);
  double previous = 1.0;
  for(const double b: {0.25, 0.5, 1.0, 1.5, 2.0}) {
    const double z = oracle::tonks_z(2.0, 0.0, b, 0.1, -kInfinity, kInfinity);
    EXPECT_LE(z, previous);
    previous = z;
  }
  // Library quadrature on nested key intervals.
  Rng rng(6);
  const auto law = RadiusLaw::delta(0.1);
  OrderInterval<1> small;
  small.lo = encode(pt<1>({1.0}, 0.1), window);
  const auto z_small = z_bruteforce(HardSphere<1>{}, 2.0, small, Configuration<1>{}, law, window, 14, 100000, rng);
  const auto z_all =
      z_bruteforce(HardSphere<1>{}, 2.0, OrderInterval<1>{}, Configuration<1>{}, law, window, 20, 100000, rng);
  EXPECT_GT(z_small.value, z_all.value);
}

TEST(Partition, RejectionWithoutInteractionIsPoisson) {
  const Window<2> window({0, 0}, {1, 1}, 0.1);
  Rng rng(7);
  RejectionStats stats;
  std::vector<long> counts;
  for(int i = 0; i < 50000; ++i) {
    counts.push_back(static_cast<long>(gibbs_rejection_sample(FreeModel<2>{}, 2.0, OrderInterval<2>{},
                                                              Configuration<2>{}, RadiusLaw::delta(0.1), window,
                                                              rng, &stats)
                                           .size()));
  }
  EXPECT_EQ(stats.accepted, stats.attempts);
  const auto t = chi_square_gof(counts, [](long k) { return poisson_pmf(static_cast<int>(k), 2.0); });
  EXPECT_GT(t.p_value, 0.01);
}

TEST(Partition, RejectionCountLawMatchesTonks) {
  const Window<1> window({0.0}, {1.0}, 0.1);
  Rng rng(8);
  std::vector<long> counts;
  for(int i = 0; i < 50000; ++i) {
    counts.push_back(static_cast<long>(gibbs_rejection_sample(HardSphere<1>{}, 3.0, OrderInterval<1>{},
                                                              Configuration<1>{}, RadiusLaw::delta(0.1), window,
                                                              rng)
                                           .size()));
  }
  const auto pmf = oracle::tonks_count_pmf(3.0, 0.0, 1.0, 0.1);
  const auto t = chi_square_gof(
      counts, [&](long k) { return k < static_cast<long>(pmf.size()) ? pmf[static_cast<std::size_t>(k)] : 0.0; });
  EXPECT_GT(t.p_value, 0.01);
}

TEST(Partition, RejectionAbortsOnDomViolation) {
  const Window<2> window({0, 0}, {1, 1}, 0.1);
  Rng rng(9);
  EXPECT_THROW(gibbs_rejection_sample(Crcm<2>(2.0), 1.0, OrderInterval<2>{}, Context<2>{}, RadiusLaw::delta(0.1),
                                      window, 1.0, rng),
               DomViolation);
}

TEST(Partition, DlrFreeModel) {
  const Window<2> window({0, 0}, {1, 1}, 0.1);
  const Window<2> sub({0, 0}, {0.5, 1}, 0.1);
  Rng rng(10);
  EXPECT_TRUE(dlr_check(FreeModel<2>{}, 2.0, window, sub, RadiusLaw::delta(0.1), 20000, rng).passed);
}

TEST(Partition, DlrHardRods) {
  const Window<1> window({0.0}, {1.0}, 0.05);
  const Window<1> sub({0.0}, {0.5}, 0.05);
  Rng rng(11);
  const auto report = dlr_check(HardSphere<1>{}, 4.0, window, sub, RadiusLaw::delta(0.05), 100000, rng);
  EXPECT_GT(report.count_p_value, 0.01);
  EXPECT_GT(report.component_p_value, 0.01);
}

TEST(Partition, DlrCrcm) {
  const Window<2> window({0, 0}, {1, 1}, 0.15);
  const Window<2> sub({0, 0}, {0.5, 0.5}, 0.15);
  Rng rng(12);
  const auto report = dlr_check(Crcm<2>(2.0), 1.0, window, sub, RadiusLaw::uniform(0.05, 0.15), 20000, rng);
  EXPECT_GT(report.count_p_value, 0.01);
  EXPECT_GT(report.component_p_value, 0.01);
}

TEST(Partition, DlrRejectsForeignSubwindow) {
  const Window<1> window({0.0}, {1.0}, 0.05);
  Rng rng(13);
  EXPECT_THROW(dlr_check(HardSphere<1>{}, 1.0, window, Window<1>({0.5}, {1.5}, 0.05), RadiusLaw::delta(0.05), 10, rng),
               std::invalid_argument);
}
