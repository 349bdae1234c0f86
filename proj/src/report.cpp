#include "v2xsim/simcore.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace v2xsim {

namespace {

/// Fixed 3-decimal formatting keeps output diffs byte-stable.
std::string
Fixed(double v)
{
    if (std::isnan(v))
    {
        return "";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

nlohmann::json
RoundOrNull(double v)
{
    if (std::isnan(v))
    {
        return nullptr;
    }
    return v;
}

nlohmann::json
ClassStatsToJson(const ClassStats& cs)
{
    return nlohmann::json{
        {"records", cs.records},       {"delivered", cs.delivered},
        {"delivery_ratio", RoundOrNull(cs.deliveryRatio)},
        {"p10_ms", RoundOrNull(cs.p10Ms)}, {"p50_ms", RoundOrNull(cs.p50Ms)},
        {"p90_ms", RoundOrNull(cs.p90Ms)}, {"p99_ms", RoundOrNull(cs.p99Ms)},
    };
}

} // namespace

void
WriteRecordsCsv(std::ostream& os, std::span<const LatencyRecord> records)
{
    os << "msg_id,tx_id,rx_id,gen_time_ms,rx_time_ms,latency_ms,priority,outcome\n";
    for (const auto& r : records)
    {
        os << r.msgId << ',' << r.txId << ',' << r.rxId << ',' << Fixed(r.genTimeMs) << ','
           << Fixed(r.rxTimeMs) << ',' << Fixed(r.latencyMs) << ',' << ToString(r.priority) << ','
           << ToString(r.outcome) << '\n';
    }
}

nlohmann::json
SummaryToJson(const Summary& s)
{
    return nlohmann::json{
        {"all", ClassStatsToJson(s.all)},
        {"high", ClassStatsToJson(s.high)},
        {"normal", ClassStatsToJson(s.normal)},
        {"frac_high_under_20ms", RoundOrNull(s.fracHighUnder20Ms)},
        {"realized_high_fraction", s.realizedHighFraction},
        {"high_vehicle_count", s.highVehicleCount},
        {"messages_generated", s.messagesGenerated},
    };
}

void
WriteCdfCsv(std::ostream& os, std::span<const CdfBin> bins)
{
    os << "bin_left_ms,bin_right_ms,count,cdf\n";
    for (const auto& b : bins)
    {
        char cdf[64];
        std::snprintf(cdf, sizeof(cdf), "%.6f", b.cdf);
        os << Fixed(b.leftMs) << ',' << Fixed(b.rightMs) << ',' << b.count << ',' << cdf << '\n';
    }
}

void
WriteSweepCsv(std::ostream& os, const SweepResult& sweep)
{
    os << "theta,seed,p50_high_ms,p90_high_ms,frac_high_under_20ms,delivery_ratio\n";
    for (const auto& row : sweep.rows)
    {
        char frac[64];
        std::snprintf(frac, sizeof(frac), "%.6f", row.fracHighUnder20Ms);
        char ratio[64];
        std::snprintf(ratio, sizeof(ratio), "%.6f", row.deliveryRatio);
        os << Fixed(row.theta) << ',' << row.seed << ',' << Fixed(row.p50HighMs) << ','
           << Fixed(row.p90HighMs) << ',' << (std::isnan(row.fracHighUnder20Ms) ? "" : frac) << ','
           << (std::isnan(row.deliveryRatio) ? "" : ratio) << '\n';
    }
}

void
WriteMacTraceCsv(std::ostream& os, std::span<const MacTraceEvent> trace)
{
    os << "slot,vehicle,action,res_slot,subchannel,cause\n";
    for (const auto& e : trace)
    {
        os << e.slot << ',' << e.vehicle << ',' << e.action << ',' << e.resSlot << ','
           << e.subchannel << ',' << e.cause << '\n';
    }
}

} // namespace v2xsim
