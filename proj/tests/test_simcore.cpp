#include "v2xsim/simcore.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

using namespace v2xsim;

namespace {

ScenarioConfig
SmallConfig()
{
    ScenarioConfig cfg;
    cfg.vehicleCount = 10;
    cfg.simDurationS = 4.0;
    cfg.warmupS = 2.0;
    cfg.mapBoundsM = 500.0;
    cfg.junctionCount = 1;
    cfg.seed = 12;
    return cfg;
}

} // namespace

TEST_CASE("nearest-rank percentile")
{
    const std::vector<double> v{5, 1, 9, 3, 7, 2, 8, 4, 10, 6}; // unsorted 1..10
    CHECK(Percentile(v, 0.10) == 1.0);
    CHECK(Percentile(v, 0.50) == 5.0);
    CHECK(Percentile(v, 0.90) == 9.0);
    CHECK(Percentile(v, 0.99) == 10.0);
    CHECK(Percentile(v, 1.00) == 10.0);
    CHECK(Percentile({42.0}, 0.5) == 42.0);
    CHECK(std::isnan(Percentile({}, 0.5)));
    CHECK(std::isnan(Percentile(v, 0.0)));
    CHECK(std::isnan(Percentile(v, 1.5)));
}

TEST_CASE("config validation names the offending field")
{
    ScenarioConfig cfg;
    CHECK_NOTHROW(cfg.Validate());

    auto expectError = [](ScenarioConfig bad, const std::string& field) {
        try
        {
            bad.Validate();
            FAIL_CHECK("expected ConfigError for " << field);
        }
        catch (const ConfigError& e)
        {
            CHECK(e.Field() == field);
        }
    };

    {
        ScenarioConfig c;
        c.sigma = 0.0;
        expectError(c, "sigma");
    }
    {
        ScenarioConfig c;
        c.theta = -1.0;
        expectError(c, "theta");
    }
    {
        ScenarioConfig c;
        c.vehicleCount = 1;
        expectError(c, "vehicle_count");
    }
    {
        ScenarioConfig c;
        c.junctionCount = 5;
        expectError(c, "junction_count");
    }
    {
        ScenarioConfig c;
        c.warmupS = c.simDurationS;
        expectError(c, "warmup_s");
    }
    {
        // the reservation period must track the beacon period
        ScenarioConfig c;
        c.bsmRateHz = 20.0;
        expectError(c, "mac.resource_reservation_period_ms");
    }
    {
        ScenarioConfig c;
        c.sps.reselectionCounterMin = 0;
        expectError(c, "mac.reselection_counter_min");
    }
    {
        ScenarioConfig c;
        c.policy.highLatencyBudgetMs = 200.0; // larger than the normal budget
        expectError(c, "policy.high_latency_budget_ms");
    }
    {
        ScenarioConfig c;
        c.channel.carrierFreqGhz = 0.1;
        expectError(c, "channel.carrier_freq_ghz");
    }
}

TEST_CASE("config json overlay")
{
    ScenarioConfig cfg;
    ApplyConfigJson(cfg, nlohmann::json{{"theta", 8.0},
                                        {"vehicle_count", 25},
                                        {"channel", {{"tx_power_dbm", 20.0}}},
                                        {"mac", {{"subchannels", 2}}},
                                        {"policy", {{"preemption_enabled", false}}}});
    CHECK(cfg.theta == 8.0);
    CHECK(cfg.vehicleCount == 25);
    CHECK(cfg.channel.txPowerDbm == 20.0);
    CHECK(cfg.grid.subchannels == 2);
    CHECK(!cfg.policy.preemptionEnabled);

    // unknown keys are hard errors, at any depth
    CHECK_THROWS_AS(ApplyConfigJson(cfg, nlohmann::json{{"thetas", 2.0}}), ConfigError);
    CHECK_THROWS_AS(ApplyConfigJson(cfg, nlohmann::json{{"channel", {{"freq", 3.5}}}}),
                    ConfigError);
    CHECK_THROWS_AS(ApplyConfigJson(cfg, nlohmann::json{{"sigma", "two"}}), ConfigError);
    CHECK_THROWS_AS(ApplyConfigJson(cfg, nlohmann::json::array()), ConfigError);

    // the export/import round trip is lossless
    const nlohmann::json dumped = ConfigToJson(cfg);
    ScenarioConfig restored;
    ApplyConfigJson(restored, dumped);
    CHECK(ConfigToJson(restored) == dumped);
}

TEST_CASE("scenario run invariants")
{
    const ScenarioConfig cfg = SmallConfig();
    const ScenarioResult result = RunScenario(cfg);

    CHECK(result.summary.messagesGenerated > 0);
    CHECK(!result.records.empty());

    const double warmupMs = cfg.warmupS * 1000.0;
    const double slotMs = cfg.grid.slotDurationMs;
    for (const LatencyRecord& r : result.records)
    {
        CHECK(r.txId != r.rxId);
        CHECK(r.txId >= 0);
        CHECK(r.txId < cfg.vehicleCount);
        CHECK(r.rxId >= 0);
        CHECK(r.rxId < cfg.vehicleCount);
        CHECK(r.genTimeMs >= warmupMs); // warm-up records are discarded
        if (r.outcome == Outcome::Delivered)
        {
            CHECK(r.latencyMs == r.rxTimeMs - r.genTimeMs);
            CHECK(r.latencyMs >= 2.0 * slotMs); // processing margin
            const double budget = r.priority == Priority::High
                                      ? cfg.policy.highLatencyBudgetMs
                                      : cfg.policy.normalLatencyBudgetMs;
            CHECK(r.latencyMs <= budget);
        }
        else
        {
            CHECK(std::isnan(r.rxTimeMs));
            CHECK(std::isnan(r.latencyMs));
        }
    }
}

TEST_CASE("summary agrees with an independent recomputation from the records")
{
    const ScenarioResult result = RunScenario(SmallConfig());
    const Summary& s = result.summary;

    std::size_t all = 0;
    std::size_t delivered = 0;
    std::vector<double> lat;
    std::vector<double> highLat;
    std::size_t highRecords = 0;
    std::size_t highUnder20 = 0;
    for (const LatencyRecord& r : result.records)
    {
        ++all;
        if (r.priority == Priority::High)
        {
            ++highRecords;
        }
        if (r.outcome == Outcome::Delivered)
        {
            ++delivered;
            lat.push_back(r.latencyMs);
            if (r.priority == Priority::High)
            {
                highLat.push_back(r.latencyMs);
                if (r.latencyMs <= 20.0)
                {
                    ++highUnder20;
                }
            }
        }
    }

    CHECK(s.all.records == all);
    CHECK(s.all.delivered == delivered);
    CHECK(s.high.records == highRecords);
    CHECK(s.all.deliveryRatio ==
          doctest::Approx(static_cast<double>(delivered) / static_cast<double>(all)));
    CHECK(s.all.p50Ms == Percentile(lat, 0.50));
    CHECK(s.all.p90Ms == Percentile(lat, 0.90));
    if (highLat.empty())
    {
        CHECK(std::isnan(s.fracHighUnder20Ms));
    }
    else
    {
        CHECK(s.fracHighUnder20Ms ==
              doctest::Approx(static_cast<double>(highUnder20) /
                              static_cast<double>(highLat.size())));
        CHECK(s.high.p50Ms == Percentile(highLat, 0.50));
    }
    CHECK(s.high.records + s.normal.records == s.all.records);
}

TEST_CASE("identical configs give identical results")
{
    const ScenarioConfig cfg = SmallConfig();
    const ScenarioResult a = RunScenario(cfg, /*captureMacTrace=*/true);
    const ScenarioResult b = RunScenario(cfg, /*captureMacTrace=*/true);

    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
    {
        CHECK(a.records[i].msgId == b.records[i].msgId);
        CHECK(a.records[i].txId == b.records[i].txId);
        CHECK(a.records[i].rxId == b.records[i].rxId);
        CHECK(a.records[i].genTimeMs == b.records[i].genTimeMs);
        CHECK(a.records[i].outcome == b.records[i].outcome);
    }
    REQUIRE(a.macTrace.size() == b.macTrace.size());
    for (std::size_t i = 0; i < a.macTrace.size(); ++i)
    {
        CHECK(a.macTrace[i].slot == b.macTrace[i].slot);
        CHECK(a.macTrace[i].vehicle == b.macTrace[i].vehicle);
        CHECK(a.macTrace[i].action == b.macTrace[i].action);
        CHECK(a.macTrace[i].resSlot == b.macTrace[i].resSlot);
    }

    // a different seed perturbs the outcome
    ScenarioConfig other = cfg;
    other.seed = cfg.seed + 1;
    const ScenarioResult c = RunScenario(other);
    CHECK((c.records.size() != a.records.size() ||
           c.summary.all.p50Ms != a.summary.all.p50Ms));
}

TEST_CASE("extreme thresholds pin the class split")
{
    ScenarioConfig cfg = SmallConfig();
    cfg.theta = 0.0; // everyone is High
    const Summary everyoneHigh = RunScenario(cfg).summary;
    CHECK(everyoneHigh.highVehicleCount == cfg.vehicleCount);
    CHECK(everyoneHigh.realizedHighFraction == 1.0);
    CHECK(everyoneHigh.normal.records == 0);

    cfg.theta = 1e9; // nobody is
    const Summary nobodyHigh = RunScenario(cfg).summary;
    CHECK(nobodyHigh.highVehicleCount == 0);
    CHECK(nobodyHigh.high.records == 0);
    CHECK(std::isnan(nobodyHigh.fracHighUnder20Ms));
}

TEST_CASE("latency cdf")
{
    std::vector<LatencyRecord> records;
    auto add = [&records](double lat, Priority p, Outcome o) {
        LatencyRecord r;
        r.latencyMs = lat;
        r.priority = p;
        r.outcome = o;
        records.push_back(r);
    };
    add(1.0, Priority::Normal, Outcome::Delivered);
    add(4.5, Priority::High, Outcome::Delivered);
    add(9.9, Priority::Normal, Outcome::Delivered);
    add(9.9, Priority::Normal, Outcome::Expired); // ignored: not delivered

    const auto bins = LatencyCdf(records, std::nullopt, 5.0);
    REQUIRE(bins.size() == 2); // [0,5) and [5,10)
    CHECK(bins[0].leftMs == 0.0);
    CHECK(bins[0].rightMs == 5.0);
    CHECK(bins[0].count == 2);
    CHECK(bins[0].cdf == doctest::Approx(2.0 / 3.0));
    CHECK(bins[1].count == 1);
    CHECK(bins[1].cdf == 1.0);

    const auto highOnly = LatencyCdf(records, Priority::High, 5.0);
    REQUIRE(highOnly.size() == 1);
    CHECK(highOnly[0].count == 1);
    CHECK(highOnly[0].cdf == 1.0);

    CHECK_THROWS(LatencyCdf(records, std::nullopt, 0.0));
    CHECK_THROWS(LatencyCdf(std::vector<LatencyRecord>{}, std::nullopt, 5.0));
}

TEST_CASE("csv and json serialization formats")
{
    std::vector<LatencyRecord> records(2);
    records[0] = {1, 0, 3, 2000.0, 2004.5, 4.5, Priority::High, Outcome::Delivered};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    records[1] = {2, 1, 4, 2100.0, nan, nan, Priority::Normal, Outcome::Expired};

    std::ostringstream os;
    WriteRecordsCsv(os, records);
    CHECK(os.str() ==
          "msg_id,tx_id,rx_id,gen_time_ms,rx_time_ms,latency_ms,priority,outcome\n"
          "1,0,3,2000.000,2004.500,4.500,High,Delivered\n"
          "2,1,4,2100.000,,,Normal,Expired\n");

    std::vector<CdfBin> bins{{0.0, 5.0, 2, 0.5}, {5.0, 10.0, 2, 1.0}};
    std::ostringstream cdfOs;
    WriteCdfCsv(cdfOs, bins);
    CHECK(cdfOs.str() == "bin_left_ms,bin_right_ms,count,cdf\n"
                         "0.000,5.000,2,0.500000\n"
                         "5.000,10.000,2,1.000000\n");

    Summary s;
    s.high.p50Ms = nan;
    const nlohmann::json j = SummaryToJson(s);
    CHECK(j["high"]["p50_ms"].is_null()); // NaN serializes as null
    CHECK(j.contains("frac_high_under_20ms"));
    CHECK(j.contains("realized_high_fraction"));
}

TEST_CASE("sweep shape and aggregates")
{
    ScenarioConfig base = SmallConfig();
    base.simDurationS = 3.0;
    const std::vector<double> thetas{0.0, 1e9};
    const std::vector<std::uint64_t> seeds{1, 2, 3};

    int rowsSeen = 0;
    const SweepResult sweep =
        RunSweep(base, thetas, seeds, [&rowsSeen](const SweepRow&, const Summary&) {
            ++rowsSeen;
        });
    CHECK(rowsSeen == 6);
    REQUIRE(sweep.rows.size() == 6);
    REQUIRE(sweep.aggregates.size() == 2);

    // theta = 0: everyone High, delivery stats present
    for (std::size_t i = 0; i < 3; ++i)
    {
        CHECK(sweep.rows[i].theta == 0.0);
        CHECK(sweep.rows[i].realizedHighFraction == 1.0);
        CHECK(!std::isnan(sweep.rows[i].p50HighMs));
    }
    // huge theta: no High vehicles anywhere, aggregate median is NaN
    for (std::size_t i = 3; i < 6; ++i)
    {
        CHECK(sweep.rows[i].realizedHighFraction == 0.0);
        CHECK(std::isnan(sweep.rows[i].p50HighMs));
    }
    CHECK(std::isnan(sweep.aggregates[1].p50HighMedianMs));
    CHECK(!std::isnan(sweep.aggregates[0].p50HighMedianMs));

    // aggregate = median over seeds of the per-seed medians
    std::vector<double> p50s{sweep.rows[0].p50HighMs, sweep.rows[1].p50HighMs,
                             sweep.rows[2].p50HighMs};
    CHECK(sweep.aggregates[0].p50HighMedianMs == Percentile(p50s, 0.50));

    const std::vector<double> noThetas;
    const std::vector<std::uint64_t> noSeeds;
    CHECK_THROWS_AS(RunSweep(base, noThetas, seeds), ConfigError);
    CHECK_THROWS_AS(RunSweep(base, thetas, noSeeds), ConfigError);

    std::ostringstream os;
    WriteSweepCsv(os, sweep);
    const std::string text = os.str();
    CHECK(text.rfind("theta,seed,p50_high_ms,p90_high_ms,frac_high_under_20ms,delivery_ratio\n",
                     0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7); // header + 6 rows
}
