#pragma once

#include "v2xsim/channel.hpp"
#include "v2xsim/distraction.hpp"
#include "v2xsim/mac.hpp"
#include "v2xsim/roadnet.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace v2xsim {

/// Configuration failure naming the offending field.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message),
          m_field(std::move(field))
    {
    }

    const std::string& Field() const { return m_field; }

  private:
    std::string m_field;
};

struct ScenarioConfig
{
    double sigma{2.0};
    double theta{4.0};
    int vehicleCount{100};
    double mapBoundsM{1000.0};
    int junctionCount{2};
    double bsmRateHz{10.0};
    int bsmSizeBytes{300};
    double simDurationS{30.0};
    std::uint64_t seed{1};
    double awarenessRangeM{150.0};
    double warmupS{2.0};
    bool staticVehicles{false};
    double speedMinMps{8.3};
    double speedMaxMps{13.9};

    ChannelConfig channel;
    GridParams grid;
    SpsConfig sps;
    PriorityPolicy policy;

    /// Throws ConfigError on the first invalid field.
    void Validate() const;
};

enum class Outcome
{
    Delivered,
    Expired,
    DecodeFailedAllAttempts,
    HalfDuplexMissed,
};

const char* ToString(Outcome o);

/// One (transmitter, receiver, message) outcome row. Latency and receive
/// time are NaN unless the record is Delivered.
struct LatencyRecord
{
    long msgId{0};
    int txId{0};
    int rxId{0};
    double genTimeMs{0.0};
    double rxTimeMs{0.0};
    double latencyMs{0.0};
    Priority priority{Priority::Normal};
    Outcome outcome{Outcome::Delivered};
};

struct ClassStats
{
    std::size_t records{0};
    std::size_t delivered{0};
    double deliveryRatio{0.0}; ///< NaN when there are no records
    double p10Ms{0.0};         ///< percentiles NaN when nothing was delivered
    double p50Ms{0.0};
    double p90Ms{0.0};
    double p99Ms{0.0};
};

struct Summary
{
    ClassStats all;
    ClassStats high;
    ClassStats normal;
    double fracHighUnder20Ms{0.0}; ///< NaN when the High class delivered nothing
    double realizedHighFraction{0.0};
    int highVehicleCount{0};
    long messagesGenerated{0};
};

/// MAC-level trace row, for the CSV dump and the brute-force oracle test.
struct MacTraceEvent
{
    long slot{0};
    int vehicle{0};
    std::string action; ///< select | reselect | tx | preempt_bump | expire
    long resSlot{-1};
    int subchannel{-1};
    std::string cause;
};

struct ScenarioResult
{
    std::vector<LatencyRecord> records;
    Summary summary;
    std::vector<MacTraceEvent> macTrace; ///< filled only when requested
};

/// Runs one scenario. Fully deterministic in (cfg, cfg.seed).
ScenarioResult RunScenario(const ScenarioConfig& cfg, bool captureMacTrace = false);

struct SweepRow
{
    double theta{0.0};
    std::uint64_t seed{0};
    double p50HighMs{0.0};
    double p90HighMs{0.0};
    double fracHighUnder20Ms{0.0};
    double deliveryRatio{0.0};
    double realizedHighFraction{0.0};
};

struct SweepAggregate
{
    double theta{0.0};
    double p50HighMedianMs{0.0}; ///< median over seeds of the per-seed medians
    double p90HighMedianMs{0.0};
    double fracHighUnder20Median{0.0};
    double deliveryRatioMedian{0.0};
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    std::vector<SweepAggregate> aggregates;
};

/// One row per (theta, seed) plus per-theta aggregates. Scenario errors are
/// rethrown tagged with the offending (theta, seed).
SweepResult RunSweep(const ScenarioConfig& base,
                     std::span<const double> thetas,
                     std::span<const std::uint64_t> seeds,
                     const std::function<void(const SweepRow&, const Summary&)>& onRow = nullptr);

struct CdfBin
{
    double leftMs{0.0};
    double rightMs{0.0};
    std::size_t count{0};
    double cdf{0.0};
};

/// Histogram/CDF over delivered latencies of the filtered class. Bins of the
/// given width cover [0, max latency]. Throws if nothing matches.
std::vector<CdfBin> LatencyCdf(std::span<const LatencyRecord> records,
                               std::optional<Priority> classFilter,
                               double binWidthMs);

/// Nearest-rank percentile (q in (0, 1]) over an unsorted sample.
double Percentile(std::vector<double> values, double q);

// --- serialization -------------------------------------------------------

/// Header: msg_id,tx_id,rx_id,gen_time_ms,rx_time_ms,latency_ms,priority,outcome
/// Times use fixed 3-decimal formatting; null fields are empty.
void WriteRecordsCsv(std::ostream& os, std::span<const LatencyRecord> records);

nlohmann::json SummaryToJson(const Summary& s);

/// Header: bin_left_ms,bin_right_ms,count,cdf
void WriteCdfCsv(std::ostream& os, std::span<const CdfBin> bins);

/// Header: theta,seed,p50_high_ms,p90_high_ms,frac_high_under_20ms,delivery_ratio
void WriteSweepCsv(std::ostream& os, const SweepResult& sweep);

/// Header: slot,vehicle,action,res_slot,subchannel,cause
void WriteMacTraceCsv(std::ostream& os, std::span<const MacTraceEvent> trace);

nlohmann::json ConfigToJson(const ScenarioConfig& cfg);

/// Overlays a JSON document onto cfg. Unknown keys are hard errors.
void ApplyConfigJson(ScenarioConfig& cfg, const nlohmann::json& j);

} // namespace v2xsim
