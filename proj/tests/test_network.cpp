#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ueassign/error.hpp"
#include "ueassign/fixtures.hpp"
#include "ueassign/network.hpp"

using namespace ueassign;

namespace {

Link sioux_1_2() { return Link{0, 1, 6.0, 25900.20064, 0.15, 4.0}; }

}  // namespace

TEST(TravelTime, ZeroFlowGivesFreeFlowTime) { EXPECT_DOUBLE_EQ(travel_time(sioux_1_2(), 0.0), 6.0); }

TEST(TravelTime, AtCapacityIsFifteenPercentSlower) {
  const Link l{0, 1, 4.0, 1234.5, 0.15, 4.0};
  EXPECT_NEAR(travel_time(l, l.capacity), 4.6, 1e-12);
}

TEST(TravelTime, PublishedEquilibriumFlowOnFirstArc) {
  // 6 * (1 + 0.15 * (4494.5 / 25900.20064)^4), 40-digit evaluation.
  EXPECT_NEAR(travel_time(sioux_1_2(), 4494.5), 6.0008161228449027, 1e-12);
  EXPECT_NEAR(travel_time(sioux_1_2(), 4494.5), 6.000817, 1e-5);
}

TEST(TravelTime, RejectsNegativeAndNonFiniteFlow) {
  EXPECT_THROW(travel_time(sioux_1_2(), -1.0), DomainError);
  EXPECT_THROW(travel_time(sioux_1_2(), std::nan("")), DomainError);
  EXPECT_THROW(travel_time(sioux_1_2(), INFINITY), DomainError);
}

TEST(TravelTime, PolynomialAndBprFormsAgree) {
  const Link l = sioux_1_2();
  const double x = 7777.0;
  EXPECT_NEAR(travel_time(l, x), l.free_flow_time + l.delay_coefficient() * std::pow(x, 4.0),
              1e-12);
}

TEST(TravelTime, MonotoneProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1e5);
  const auto net = fixtures::sioux_falls().network;
  for (int k = 0; k < 1000; ++k) {
    const Link& l = net.link(static_cast<std::size_t>(k) % net.link_count());
    double x1 = u(rng), x2 = u(rng);
    if (x1 > x2) std::swap(x1, x2);
    if (x1 == x2) continue;
    EXPECT_LT(travel_time(l, x1), travel_time(l, x2));
  }
}

TEST(Beckmann, ZeroFlowIsZero) {
  const auto net = fixtures::sioux_falls().network;
  EXPECT_EQ(beckmann_objective(net, std::vector<double>(net.link_count(), 0.0)), 0.0);
}

TEST(Beckmann, SingleLinkClosedForm) {
  const Network net(2, {Link{0, 1, 2.0, 1.0, 0.15, 4.0}});
  const std::vector<double> x{1.0};
  EXPECT_NEAR(beckmann_objective(net, x), 2.06, 1e-14);
  EXPECT_NEAR(beckmann_objective(net, x), oracle::beckmann_by_quadrature(net, x), 1e-12);
}

TEST(Beckmann, SiouxFallsPublishedFlowsMatchQuadrature) {
  const auto net = fixtures::sioux_falls().network;
  const auto x = fixtures::sioux_falls_reference_flows();
  const double z = beckmann_objective(net, x);
  EXPECT_GT(z, 0.0);
  EXPECT_NEAR(z, oracle::beckmann_by_quadrature(net, x), 1e-8 * z);
}

TEST(Beckmann, ConvexitySandwich) {
  const auto net = fixtures::sioux_falls().network;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 20000.0);
  std::uniform_real_distribution<double> step(1.0, 3000.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(net.link_count());
    for (double& v : x) v = u(rng);
    const std::size_t a = static_cast<std::size_t>(trial) % net.link_count();
    const double delta = step(rng);
    std::vector<double> y = x;
    y[a] += delta;
    const double dz = beckmann_objective(net, y) - beckmann_objective(net, x);
    const double lo = travel_time(net.link(a), x[a]) * delta;
    const double hi = travel_time(net.link(a), y[a]) * delta;
    EXPECT_GE(dz, lo * (1 - 1e-9));
    EXPECT_LE(dz, hi * (1 + 1e-9));
  }
}

TEST(Gradient, ZeroFlowGivesFreeFlowTimes) {
  const auto net = fixtures::sioux_falls().network;
  EXPECT_EQ(beckmann_gradient(net, std::vector<double>(net.link_count(), 0.0)),
            net.free_flow_times());
}

TEST(Gradient, AtCapacity) {
  const Network net(2, {Link{0, 1, 3.0, 40.0, 0.15, 4.0}});
  EXPECT_NEAR(beckmann_gradient(net, std::vector<double>{40.0})[0], 1.15 * 3.0, 1e-12);
}

TEST(Gradient, MatchesCentralFiniteDifferences) {
  const auto net = fixtures::sioux_falls().network;
  std::mt19937_64 rng(3);
  // Volumes up to capacity; far above it the step's truncation error alone
  // approaches the tolerance.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(net.link_count());
    for (LinkIndex a = 0; a < x.size(); ++a) x[a] = u(rng) * net.link(a).capacity;
    const auto g = beckmann_gradient(net, x);
    for (LinkIndex a = 0; a < net.link_count(); ++a) {
      const double h = 1e-3 * std::max(1.0, x[a]);
      std::vector<double> xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      const double fd = (beckmann_objective(net, xp) - beckmann_objective(net, xm)) / (2 * h);
      EXPECT_NEAR(fd, g[a], 1e-6 * std::abs(g[a]));
    }
  }
}

TEST(Network, AdjacencyPartitionsLinksInInputOrder) {
  const auto net = fixtures::sioux_falls().network;
  EXPECT_EQ(net.node_count(), 24u);
  EXPECT_EQ(net.link_count(), 76u);
  std::vector<int> out_seen(net.link_count(), 0), in_seen(net.link_count(), 0);
  for (NodeIndex v = 0; v < net.node_count(); ++v) {
    LinkIndex prev = 0;
    bool first = true;
    for (LinkIndex a : net.out_links(v)) {
      EXPECT_EQ(net.link(a).tail, v);
      if (!first) EXPECT_LT(prev, a);
      prev = a;
      first = false;
      ++out_seen[a];
    }
    for (LinkIndex a : net.in_links(v)) {
      EXPECT_EQ(net.link(a).head, v);
      ++in_seen[a];
    }
  }
  for (LinkIndex a = 0; a < net.link_count(); ++a) {
    EXPECT_EQ(out_seen[a], 1);
    EXPECT_EQ(in_seen[a], 1);
  }
  // Two-way roads share an undirected pair.
  EXPECT_EQ(net.pairs().size(), 38u);
  EXPECT_EQ(net.pair_of(*net.find_link(0, 1)), net.pair_of(*net.find_link(1, 0)));
}

TEST(Network, RejectsInvalidLinks) {
  EXPECT_THROW(Network(2, {Link{0, 0, 1.0, 1.0}}), DomainError);
  EXPECT_THROW(Network(2, {Link{0, 2, 1.0, 1.0}}), DomainError);
  EXPECT_THROW(Network(2, {Link{0, 1, 0.0, 1.0}}), DomainError);
  EXPECT_THROW(Network(2, {Link{0, 1, 1.0, -1.0}}), DomainError);
  EXPECT_THROW(Network(2, {Link{0, 1, 1.0, 1.0}, Link{0, 1, 2.0, 1.0}}), DuplicateLinkError);
  EXPECT_NO_THROW(Network(2, {Link{0, 1, 1.0, 1.0}, Link{1, 0, 2.0, 1.0}}));
}

TEST(DemandTable, GroupsByOriginAndTotals) {
  const DemandTable t({{3, 2, 100.0}, {0, 1, 100.0}, {0, 2, 50.0}});
  EXPECT_EQ(t.origins(), (std::vector<NodeIndex>{0, 3}));
  EXPECT_DOUBLE_EQ(t.origin_total(0), 150.0);
  EXPECT_DOUBLE_EQ(t.origin_total(3), 100.0);
  EXPECT_DOUBLE_EQ(t.origin_total(1), 0.0);
  EXPECT_DOUBLE_EQ(t.total_demand(), 250.0);
  ASSERT_EQ(t.from_origin(0).size(), 2u);
  EXPECT_EQ(t.from_origin(0)[0].destination, 1u);
}

TEST(DemandTable, RejectsSelfPairsDuplicatesAndNonPositive) {
  EXPECT_THROW(DemandTable({{1, 1, 5.0}}), DomainError);
  EXPECT_THROW(DemandTable({{0, 1, 5.0}, {0, 1, 2.0}}), DomainError);
  EXPECT_THROW(DemandTable({{0, 1, 0.0}}), DomainError);
  EXPECT_THROW(DemandTable({{0, 1, -3.0}}), DomainError);
}

TEST(Flows, ValidationRejectsBadVectors) {
  const Network net(2, {Link{0, 1, 1.0, 1.0}});
  EXPECT_THROW(validate_flows(net, std::vector<double>{}), DomainError);
  EXPECT_THROW(validate_flows(net, std::vector<double>{-1.0}), DomainError);
  EXPECT_NO_THROW(validate_flows(net, std::vector<double>{0.0}));
}
