#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "evprice/objectives.hpp"
#include "test_util.hpp"

namespace {

using evprice::Matrix;
using evprice::PriceSchedule;
using testutil::small_scenario;

PriceSchedule row_prices(std::initializer_list<double> v) {
  PriceSchedule p(1, v.size(), 0.0);
  std::size_t t = 0;
  for (double x : v) p(0, t++) = x;
  return p;
}

TEST(DemandMatrix, ReferencePriceIdentity) {
  auto s = small_scenario(2, 4, -1.3);
  s.base_profile(1, 2) = 7.25;
  const auto d = evprice::demand_matrix(s, PriceSchedule(2, 4, s.p_ref));
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_NEAR(d.flat()[i], s.base_profile.flat()[i], 1e-12 * s.base_profile.flat()[i]);
  }
}

TEST(DemandMatrix, ZeroElasticityIgnoresPrice) {
  const auto s = small_scenario(2, 3, 0.0, 3.5);
  const auto d = evprice::demand_matrix(s, PriceSchedule(2, 3, 0.9));
  EXPECT_EQ(d, s.base_profile);
}

TEST(DemandMatrix, HandRatio) {
  auto s = small_scenario(1, 1, -1.0);
  s.p_ref = 0.2;
  const auto d = evprice::demand_matrix(s, row_prices({0.4}));
  EXPECT_NEAR(d(0, 0), 2.0, 1e-12);
}

TEST(Delivered, CapsEntrywise) {
  auto s = small_scenario(1, 3, 0.0);
  s.capacity(0, 0) = 3;
  s.capacity(0, 1) = 3;
  s.capacity(0, 2) = 0;
  Matrix d(1, 3);
  d(0, 0) = 5;
  d(0, 1) = 2;
  d(0, 2) = 4;
  const auto out = evprice::delivered(s, d);
  EXPECT_EQ(out(0, 0), 3);
  EXPECT_EQ(out(0, 1), 2);
  EXPECT_EQ(out(0, 2), 0);
}

TEST(Revenue, DirectSum) {
  auto s = small_scenario(1, 2, 0.0);
  s.p_max = 5.0;
  s.base_profile(0, 0) = 5;
  s.base_profile(0, 1) = 4;
  EXPECT_DOUBLE_EQ(evprice::f_revenue(s, row_prices({2, 3})), 22.0);
}

TEST(Revenue, CappedVersusLiteral) {
  auto s = small_scenario(1, 1, 0.0, 5.0, 3.0);
  s.p_max = 5.0;
  EXPECT_DOUBLE_EQ(evprice::f_revenue(s, row_prices({2})), 6.0);
  s.revenue_mode = evprice::RevenueMode::kLiteral;
  EXPECT_DOUBLE_EQ(evprice::f_revenue(s, row_prices({2})), 10.0);
}

TEST(Revenue, LinearInPriceAtFixedDemand) {
  auto s = small_scenario(1, 4, 0.0, 2.5);
  EXPECT_NEAR(evprice::f_revenue(s, PriceSchedule(1, 4, s.p_min)), s.p_min * 10.0, 1e-12);
}

TEST(Par, HandValues) {
  auto s = small_scenario(1, 2, 0.0);
  s.base_profile(0, 0) = 4;
  s.base_profile(0, 1) = 2;
  EXPECT_DOUBLE_EQ(evprice::f_par(s, PriceSchedule(1, 2, 0.3)), 1.5);

  const auto flat = small_scenario(1, 3, 0.0, 3.0);
  EXPECT_DOUBLE_EQ(evprice::f_par(flat, PriceSchedule(1, 3, 0.3)), 1.0);

  auto two = small_scenario(2, 2, 0.0);
  for (std::size_t cs = 0; cs < 2; ++cs) {
    two.base_profile(cs, 0) = 4;
    two.base_profile(cs, 1) = 2;
  }
  EXPECT_DOUBLE_EQ(evprice::f_par(two, PriceSchedule(2, 2, 0.3)), 1.5);
}

TEST(Par, EmptySlotsStayFinite) {
  auto s = small_scenario(1, 2, 0.0);
  s.base_profile(0, 1) = 0.0;
  const double par = evprice::f_par(s, PriceSchedule(1, 2, 0.3));
  EXPECT_TRUE(std::isfinite(par));
  EXPECT_NEAR(par, 0.5 * (1.0 + 4.0 / evprice::kDemandEpsilon), 1e-3);
}

TEST(Qos, HandValues) {
  EXPECT_DOUBLE_EQ(evprice::f_qos(small_scenario(2, 3, -1.0), PriceSchedule(2, 3, 0.3)), 1.0);
  EXPECT_DOUBLE_EQ(evprice::f_qos(small_scenario(1, 1, 0.0, 4.0, 1.0), PriceSchedule(1, 1, 0.3)),
                   0.25);
  auto s = small_scenario(1, 2, 0.0, 0.0, 2.0);
  s.base_profile(0, 0) = 4;
  s.base_profile(0, 1) = 2;
  EXPECT_DOUBLE_EQ(evprice::f_qos(s, PriceSchedule(1, 2, 0.3)), 0.75);
}

TEST(Qos, EmptySlotCountsAsServed) {
  auto s = small_scenario(1, 2, 0.0, 4.0, 0.0);
  s.base_profile(0, 1) = 0.0;
  EXPECT_DOUBLE_EQ(evprice::f_qos(s, PriceSchedule(1, 2, 0.3)), 0.5);
}

TEST(Evaluate, CompositionAndDeterminism) {
  auto s = small_scenario(1, 2, 0.0, 3.0);
  const auto p = row_prices({0.2, 0.4});
  const auto t = evprice::evaluate(s, p);
  EXPECT_DOUBLE_EQ(t.qos, 1.0);
  EXPECT_DOUBLE_EQ(t.par, 1.0);
  EXPECT_DOUBLE_EQ(t.revenue, 0.2 * 3 + 0.4 * 3);
  EXPECT_EQ(t, evprice::evaluate(s, p));

  s.base_profile(0, 0) = 4;
  s.base_profile(0, 1) = 2;
  EXPECT_DOUBLE_EQ(evprice::evaluate(s, p).par, 1.5);
  EXPECT_EQ(evprice::evaluate(s, p).revenue, evprice::f_revenue(s, p));
  EXPECT_EQ(evprice::evaluate(s, p).qos, evprice::f_qos(s, p));
  EXPECT_EQ(evprice::evaluate(s, p).par, evprice::f_par(s, p));
}

TEST(ObjectiveProperties, UniformPriceLeavesParUnchanged) {
  auto s = small_scenario(1, 4, -1.4);
  s.base_profile(0, 0) = 1;
  s.base_profile(0, 1) = 3;
  s.base_profile(0, 2) = 6;
  s.base_profile(0, 3) = 2;
  s.capacity = Matrix(1, 4, 1e9);
  const double ref = evprice::f_par(s, PriceSchedule(1, 4, s.p_ref));
  for (double p : {s.p_min, s.p_ref, s.p_max}) {
    const auto t = evprice::evaluate(s, PriceSchedule(1, 4, p));
    EXPECT_DOUBLE_EQ(t.qos, 1.0);
    EXPECT_NEAR(t.par, ref, 1e-12 * ref);
  }
}

TEST(ObjectiveProperties, RandomSchedules) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const std::size_t t = 24;
    auto s = small_scenario(n, t, -2.0 * u(rng));
    s.models[0].c_mean = 1.0 - 2.0 * u(rng);
    for (double& b : s.base_profile.flat()) b = 10.0 * u(rng) + 1e-3;
    for (double& c : s.capacity.flat()) c = 8.0 * u(rng);
    PriceSchedule p(n, t, 0.0);
    for (double& x : p.prices().flat()) x = s.p_min + (s.p_max - s.p_min) * u(rng);

    const auto capped = evprice::evaluate(s, p);
    EXPECT_GE(capped.qos, 0.0);
    EXPECT_LE(capped.qos, 1.0);
    EXPECT_GE(capped.par, 1.0);
    EXPECT_GE(capped.revenue, 0.0);
    s.revenue_mode = evprice::RevenueMode::kLiteral;
    EXPECT_LE(capped.revenue, evprice::f_revenue(s, p) * (1 + 1e-12));
  }
}

TEST(Scenario, Validation) {
  auto s = small_scenario(2, 4, -1.0);
  EXPECT_NO_THROW(s.validate());
  auto bad = s;
  bad.p_min = 0.0;
  EXPECT_THROW(bad.validate(), evprice::InputError);
  bad = s;
  bad.p_min = 2.0;
  EXPECT_THROW(bad.validate(), evprice::InputError);
  bad = s;
  bad.capacity = Matrix(2, 3);
  EXPECT_THROW(bad.validate(), evprice::InputError);
  bad = s;
  bad.models.pop_back();
  EXPECT_THROW(bad.validate(), evprice::InputError);
  bad = s;
  bad.grid = {96, 10};
  EXPECT_THROW(bad.validate(), evprice::InputError);

  EXPECT_NO_THROW(evprice::check_bounds(s, PriceSchedule(2, 4, s.p_max)));
  EXPECT_THROW(evprice::check_bounds(s, PriceSchedule(2, 4, s.p_max + 0.01)), evprice::InputError);
  EXPECT_THROW(evprice::check_bounds(s, PriceSchedule(2, 3, s.p_ref)), evprice::InputError);
}

TEST(Scenario, GenomeRoundTrip) {
  const std::vector<double> g = {1, 2, 3, 4, 5, 6};
  const auto p = PriceSchedule::from_genome(g, 2, 3);
  EXPECT_EQ(p(1, 0), 4);
  EXPECT_EQ(p(0, 2), 3);
  EXPECT_THROW(PriceSchedule::from_genome(g, 2, 2), evprice::InputError);

  const evprice::ObjectiveTriple t{10, 0.5, 2};
  const auto m = t.minimization();
  EXPECT_EQ(evprice::ObjectiveTriple::from_minimization(m), t);
  EXPECT_EQ(m[0], -10);
}

}  // namespace
