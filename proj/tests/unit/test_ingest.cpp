#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "evprice/ingest.hpp"
#include "test_util.hpp"

namespace {

using evprice::SessionRecord;
using evprice::SlotGrid;

constexpr double kDay = 1440.0;

std::string acn_row(const std::string& id, const std::string& t0, const std::string& t1, double kwh) {
  return R"({"stationID": ")" + id + R"(", "connectionTime": ")" + t0 +
         R"(", "disconnectTime": ")" + t1 + R"(", "kWhDelivered": )" + std::to_string(kwh) + "}";
}

TEST(ParseTimestamp, IsoAndRfc1123) {
  using evprice::detail::parse_timestamp;
  const auto a = parse_timestamp("2018-04-25T11:08:04Z");
  const auto b = parse_timestamp("2018-04-25 11:08:04");
  const auto c = parse_timestamp("Wed, 25 Apr 2018 11:08:04 GMT");
  ASSERT_TRUE(a && b && c);
  EXPECT_DOUBLE_EQ(*a, *b);
  EXPECT_DOUBLE_EQ(*a, *c);
  EXPECT_NEAR(std::fmod(*a, kDay), 11 * 60 + 8 + 4.0 / 60.0, 1e-9);
  EXPECT_FALSE(parse_timestamp("yesterday"));
  EXPECT_FALSE(parse_timestamp(""));
}

TEST(LoadSessions, OneValidRow) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json",
                       "[" + acn_row("CA-1", "2018-04-25T01:00:00Z", "2018-04-25T02:00:00Z", 8) + "]");
  const auto load = evprice::load_sessions((dir / "s.json").string());
  ASSERT_EQ(load.sessions.size(), 1u);
  EXPECT_EQ(load.warning_count, 0u);
  EXPECT_EQ(load.sessions[0].station_id, "CA-1");
  EXPECT_DOUBLE_EQ(load.sessions[0].energy_kwh, 8.0);
}

TEST(LoadSessions, MalformedRowCounted) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json",
                       "{\"_items\": [" +
                           acn_row("CA-1", "2018-04-25T01:00:00Z", "2018-04-25T02:00:00Z", 8) +
                           R"(, {"stationID": "CA-2", "connectionTime": "bad"}]})");
  const auto load = evprice::load_sessions((dir / "s.json").string());
  EXPECT_EQ(load.sessions.size(), 1u);
  EXPECT_EQ(load.warning_count, 1u);
  EXPECT_EQ(load.warnings.size(), 1u);
}

TEST(LoadSessions, ReversedTimesSkippedWithWarning) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json",
                       "[" + acn_row("A", "2018-04-25T01:00:00Z", "2018-04-25T02:00:00Z", 8) + "," +
                           acn_row("B", "2018-04-25T03:00:00Z", "2018-04-25T02:00:00Z", 8) + "," +
                           acn_row("C", "2018-04-25T03:00:00Z", "2018-04-25T04:00:00Z", -1) + "]");
  const auto load = evprice::load_sessions((dir / "s.json").string());
  EXPECT_EQ(load.sessions.size(), 1u);
  EXPECT_EQ(load.warning_count, 2u);
}

TEST(LoadSessions, Csv) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.csv",
                       "stationID,connectionTime,disconnectTime,kWhDelivered\n"
                       "A,2018-04-25T01:00:00Z,2018-04-25T02:00:00Z,8\n"
                       "\"B,1\",2018-04-25T01:00:00Z,2018-04-25T01:30:00Z,2.5\n"
                       "C,2018-04-25T01:00:00Z,,3\n");
  const auto load = evprice::load_sessions((dir / "s.csv").string());
  ASSERT_EQ(load.sessions.size(), 2u);
  EXPECT_EQ(load.sessions[1].station_id, "B,1");
  EXPECT_EQ(load.warning_count, 1u);
}

TEST(LoadSessions, Errors) {
  testutil::TempDir dir;
  testutil::write_file(dir / "empty.json", "");
  try {
    evprice::load_sessions((dir / "empty.json").string());
    FAIL();
  } catch (const evprice::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("zero valid rows"), std::string::npos);
  }
  const auto missing = (dir / "nope.json").string();
  try {
    evprice::load_sessions(missing);
    FAIL();
  } catch (const evprice::InputError& e) {
    EXPECT_NE(std::string(e.what()).find(missing), std::string::npos);
  }
  testutil::write_file(dir / "bad.json", "[{]");
  EXPECT_THROW(evprice::load_sessions((dir / "bad.json").string()), evprice::InputError);
}

TEST(SlotDemand, UniformSplit) {
  const std::vector<SessionRecord> s = {{"A", 60.0, 120.0, 8.0}};
  const auto p = evprice::slot_demand(s, SlotGrid{});
  ASSERT_EQ(p.station_ids, std::vector<std::string>{"A"});
  EXPECT_EQ(p.days, 1u);
  for (std::size_t t = 0; t < 96; ++t) {
    EXPECT_NEAR(p.kwh(0, t), (t >= 4 && t <= 7) ? 2.0 : 0.0, 1e-12) << t;
  }
}

TEST(SlotDemand, OverlapProration) {
  const std::vector<SessionRecord> s = {{"A", 7.5, 30.0, 3.0}};
  const auto p = evprice::slot_demand(s, SlotGrid{});
  EXPECT_NEAR(p.kwh(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(p.kwh(0, 1), 2.0, 1e-12);
}

TEST(SlotDemand, DuplicateDayAveragesToSameProfile) {
  const std::vector<SessionRecord> one = {{"A", 7.5, 30.0, 3.0}};
  const std::vector<SessionRecord> two = {{"A", 7.5, 30.0, 3.0}, {"A", kDay + 7.5, kDay + 30.0, 3.0}};
  const auto p1 = evprice::slot_demand(one, SlotGrid{});
  const auto p2 = evprice::slot_demand(two, SlotGrid{});
  EXPECT_EQ(p2.days, 2u);
  for (std::size_t t = 0; t < 96; ++t) EXPECT_NEAR(p1.kwh(0, t), p2.kwh(0, t), 1e-12);
}

TEST(SlotDemand, SessionInsideOneSlot) {
  const std::vector<SessionRecord> s = {{"A", 5 * 15.0 + 2.0, 5 * 15.0 + 9.0, 1.7}};
  const auto p = evprice::slot_demand(s, SlotGrid{});
  EXPECT_DOUBLE_EQ(p.kwh(0, 5), 1.7);
  EXPECT_DOUBLE_EQ(std::accumulate(p.kwh.flat().begin(), p.kwh.flat().end(), 0.0), 1.7);
}

TEST(SlotDemand, OvernightSessionWrapsToNextDay) {
  const std::vector<SessionRecord> s = {{"A", kDay - 15.0, kDay + 15.0, 2.0}};
  const auto p = evprice::slot_demand(s, SlotGrid{});
  EXPECT_EQ(p.days, 2u);
  EXPECT_NEAR(p.kwh(0, 95), 0.5, 1e-12);
  EXPECT_NEAR(p.kwh(0, 0), 0.5, 1e-12);
}

TEST(SlotDemand, SiteWideAggregation) {
  const std::vector<SessionRecord> s = {{"A", 60.0, 75.0, 1.0}, {"B", 60.0, 75.0, 2.0}};
  const auto per = evprice::slot_demand(s, SlotGrid{});
  const auto site = evprice::slot_demand(s, SlotGrid{}, evprice::Aggregation::kSiteWide);
  EXPECT_EQ(per.station_ids.size(), 2u);
  ASSERT_EQ(site.station_ids, std::vector<std::string>{evprice::kSiteStationId});
  EXPECT_DOUBLE_EQ(site.kwh(0, 4), 3.0);
}

TEST(SlotDemand, ConservationProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> start(0.0, kDay - 1.0), len(1.0, 600.0), kwh(0.0, 40.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SessionRecord> s;
    double total = 0.0;
    const int n = 1 + trial % 7;
    for (int i = 0; i < n; ++i) {
      const double t0 = start(rng);
      const double t1 = std::min(kDay, t0 + len(rng));
      s.push_back({"A", t0, t1, kwh(rng)});
      total += s.back().energy_kwh;
    }
    for (const auto& grid : {SlotGrid{}, SlotGrid{24, 60}, SlotGrid{288, 5}}) {
      const auto p = evprice::slot_demand(s, grid);
      const double sum = std::accumulate(p.kwh.flat().begin(), p.kwh.flat().end(), 0.0);
      EXPECT_NEAR(sum, total, 1e-9 * std::max(1.0, total));
    }
  }
}

TEST(PairWithPrices, PositivityFilter) {
  evprice::DemandProfile prof;
  prof.station_ids = {"A"};
  prof.kwh = evprice::Matrix(1, 2);
  prof.kwh(0, 0) = 2.0;
  evprice::PriceSchedule prices(1, 2, 0.3);
  prices(0, 1) = 0.4;
  auto obs = evprice::pair_with_prices(prof, prices);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].slot_index, 0u);
  EXPECT_DOUBLE_EQ(obs[0].price, 0.3);

  prof.kwh(0, 1) = 3.0;
  obs = evprice::pair_with_prices(prof, prices);
  EXPECT_EQ(obs.size(), 2u);
  EXPECT_LE(obs.size(), prof.kwh.size());

  prof.kwh = evprice::Matrix(1, 2);
  EXPECT_THROW(evprice::pair_with_prices(prof, prices), evprice::InputError);
  EXPECT_THROW(evprice::pair_with_prices(prof, evprice::PriceSchedule(2, 2, 0.3)),
               evprice::InputError);
}

TEST(Synth, NoiselessValues) {
  std::mt19937_64 rng(1);
  const std::vector<double> prices = {1.0, 4.0};
  const auto obs = evprice::synth_observations("A", {10.0, -1.5, 0.0}, prices, rng);
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_DOUBLE_EQ(obs[0].demand, 10.0);
  EXPECT_NEAR(obs[1].demand, 1.25, 1e-12);
}

TEST(Synth, Deterministic) {
  const auto a = evprice::synth_scenario(evprice::elastic_demo_options());
  const auto b = evprice::synth_scenario(evprice::elastic_demo_options());
  ASSERT_EQ(a.observations.size(), b.observations.size());
  for (std::size_t i = 0; i < a.observations.size(); ++i) {
    EXPECT_EQ(a.observations[i].demand, b.observations[i].demand);
  }
  EXPECT_EQ(a.scenario.base_profile, b.scenario.base_profile);
  EXPECT_EQ(a.scenario.capacity, b.scenario.capacity);
}

TEST(Synth, RejectsBadTruth) {
  std::mt19937_64 rng(1);
  const std::vector<double> prices = {1.0};
  EXPECT_THROW(evprice::synth_observations("A", {0.0, -1.0, 0.0}, prices, rng), evprice::InputError);
  EXPECT_THROW(evprice::synth_observations("A", {1.0, -1.0, -0.1}, prices, rng), evprice::InputError);
  const std::vector<double> bad = {0.0};
  EXPECT_THROW(evprice::synth_observations("A", {1.0, -1.0, 0.0}, bad, rng), evprice::InputError);
}

TEST(Synth, BundledScenarioIsElasticAndCapacityBinds) {
  const auto d = evprice::synth_scenario(evprice::elastic_demo_options());
  const auto& s = d.scenario;
  EXPECT_EQ(s.n_stations(), 4u);
  EXPECT_EQ(s.n_slots(), 96u);
  bool binds = false;
  for (std::size_t cs = 0; cs < 4; ++cs) {
    EXPECT_DOUBLE_EQ(s.models[cs].c_mean, -1.2);
    for (std::size_t t = 0; t < 96; ++t) binds |= s.base_profile(cs, t) > s.capacity(cs, t);
  }
  EXPECT_TRUE(binds);
}

}  // namespace
