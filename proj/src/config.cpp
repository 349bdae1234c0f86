#include "v2xsim/simcore.hpp"

#include <cmath>

namespace v2xsim {

void
ScenarioConfig::Validate() const
{
    if (!(sigma > 0.0))
    {
        throw ConfigError("sigma", "must be > 0");
    }
    if (theta < 0.0)
    {
        throw ConfigError("theta", "must be >= 0");
    }
    if (vehicleCount < 2)
    {
        throw ConfigError("vehicle_count", "must be >= 2");
    }
    if (!(mapBoundsM > 0.0))
    {
        throw ConfigError("map_bounds_m", "must be > 0");
    }
    if (junctionCount < 1 || junctionCount > 4)
    {
        throw ConfigError("junction_count", "must be between 1 and 4");
    }
    if (!(bsmRateHz > 0.0))
    {
        throw ConfigError("bsm_rate_hz", "must be > 0");
    }
    if (bsmSizeBytes < 1)
    {
        throw ConfigError("bsm_size_bytes", "must be >= 1");
    }
    if (!(simDurationS > 0.0))
    {
        throw ConfigError("sim_duration_s", "must be > 0");
    }
    if (warmupS < 0.0 || warmupS >= simDurationS)
    {
        throw ConfigError("warmup_s", "must be >= 0 and < sim_duration_s");
    }
    if (!(awarenessRangeM > 0.0))
    {
        throw ConfigError("awareness_range_m", "must be > 0");
    }
    if (!(speedMinMps > 0.0) || speedMaxMps < speedMinMps)
    {
        throw ConfigError("speed_min_mps", "need 0 < speed_min_mps <= speed_max_mps");
    }
    if (channel.carrierFreqGhz < 0.5 || channel.carrierFreqGhz > 100.0)
    {
        throw ConfigError("channel.carrier_freq_ghz", "must be in [0.5, 100]");
    }
    if (!(channel.bandwidthPerSubchannelHz > 0.0))
    {
        throw ConfigError("channel.bandwidth_per_subchannel_hz", "must be > 0");
    }
    if (!std::isfinite(channel.txPowerDbm) || !std::isfinite(channel.noiseFigureDb) ||
        !std::isfinite(channel.shadowSigmaLosDb) || !std::isfinite(channel.shadowSigmaNlosDb) ||
        !std::isfinite(channel.sinrDecodeThresholdDb))
    {
        throw ConfigError("channel", "powers and sigmas must be finite");
    }
    if (!(grid.slotDurationMs > 0.0))
    {
        throw ConfigError("mac.slot_duration_ms", "must be > 0");
    }
    if (grid.subchannels < 1)
    {
        throw ConfigError("mac.subchannels", "must be >= 1");
    }
    try
    {
        (void)PeriodSlots(grid, sps);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("mac.resource_reservation_period_ms", e.what());
    }
    const double bsmPeriodMs = 1000.0 / bsmRateHz;
    if (std::abs(sps.resourceReservationPeriodMs - bsmPeriodMs) > 1e-9)
    {
        throw ConfigError("mac.resource_reservation_period_ms",
                          "must equal the BSM period (1000 / bsm_rate_hz)");
    }
    if (sps.reselectionCounterMin < 1 || sps.reselectionCounterMax < sps.reselectionCounterMin)
    {
        throw ConfigError("mac.reselection_counter_min",
                          "need 1 <= counter_min <= counter_max");
    }
    if (!(policy.highLatencyBudgetMs > 0.0) || policy.normalLatencyBudgetMs < policy.highLatencyBudgetMs)
    {
        throw ConfigError("policy.high_latency_budget_ms",
                          "need 0 < high budget <= normal budget");
    }
    if (policy.highLatencyBudgetMs < 2.0 * grid.slotDurationMs)
    {
        throw ConfigError("policy.high_latency_budget_ms",
                          "shorter than the 2-slot processing margin");
    }
    if (!(policy.thresholdStepDb > 0.0))
    {
        throw ConfigError("policy.threshold_step_db", "must be > 0");
    }
}

namespace {

template <typename T>
void
Assign(T& out, const nlohmann::json& value, const std::string& key)
{
    try
    {
        out = value.get<T>();
    }
    catch (const nlohmann::json::exception&)
    {
        throw ConfigError(key, "wrong type");
    }
}

} // namespace

void
ApplyConfigJson(ScenarioConfig& cfg, const nlohmann::json& j)
{
    if (!j.is_object())
    {
        throw ConfigError("<root>", "config must be a JSON object");
    }
    for (const auto& [key, value] : j.items())
    {
        if (key == "sigma") Assign(cfg.sigma, value, key);
        else if (key == "theta") Assign(cfg.theta, value, key);
        else if (key == "vehicle_count") Assign(cfg.vehicleCount, value, key);
        else if (key == "map_bounds_m") Assign(cfg.mapBoundsM, value, key);
        else if (key == "junction_count") Assign(cfg.junctionCount, value, key);
        else if (key == "bsm_rate_hz") Assign(cfg.bsmRateHz, value, key);
        else if (key == "bsm_size_bytes") Assign(cfg.bsmSizeBytes, value, key);
        else if (key == "sim_duration_s") Assign(cfg.simDurationS, value, key);
        else if (key == "seed") Assign(cfg.seed, value, key);
        else if (key == "awareness_range_m") Assign(cfg.awarenessRangeM, value, key);
        else if (key == "warmup_s") Assign(cfg.warmupS, value, key);
        else if (key == "static_vehicles") Assign(cfg.staticVehicles, value, key);
        else if (key == "speed_min_mps") Assign(cfg.speedMinMps, value, key);
        else if (key == "speed_max_mps") Assign(cfg.speedMaxMps, value, key);
        else if (key == "channel")
        {
            if (!value.is_object())
            {
                throw ConfigError(key, "must be an object");
            }
            for (const auto& [ck, cv] : value.items())
            {
                const std::string path = "channel." + ck;
                if (ck == "carrier_freq_ghz") Assign(cfg.channel.carrierFreqGhz, cv, path);
                else if (ck == "tx_power_dbm") Assign(cfg.channel.txPowerDbm, cv, path);
                else if (ck == "noise_figure_db") Assign(cfg.channel.noiseFigureDb, cv, path);
                else if (ck == "bandwidth_per_subchannel_hz")
                    Assign(cfg.channel.bandwidthPerSubchannelHz, cv, path);
                else if (ck == "shadow_sigma_los_db") Assign(cfg.channel.shadowSigmaLosDb, cv, path);
                else if (ck == "shadow_sigma_nlos_db") Assign(cfg.channel.shadowSigmaNlosDb, cv, path);
                else if (ck == "antenna_height_m") Assign(cfg.channel.antennaHeightM, cv, path);
                else if (ck == "sinr_decode_threshold_db")
                    Assign(cfg.channel.sinrDecodeThresholdDb, cv, path);
                else throw ConfigError(path, "unknown key");
            }
        }
        else if (key == "mac")
        {
            if (!value.is_object())
            {
                throw ConfigError(key, "must be an object");
            }
            for (const auto& [mk, mv] : value.items())
            {
                const std::string path = "mac." + mk;
                if (mk == "slot_duration_ms") Assign(cfg.grid.slotDurationMs, mv, path);
                else if (mk == "subchannels") Assign(cfg.grid.subchannels, mv, path);
                else if (mk == "resource_reservation_period_ms")
                    Assign(cfg.sps.resourceReservationPeriodMs, mv, path);
                else if (mk == "rsrp_exclusion_threshold_dbm")
                    Assign(cfg.sps.rsrpExclusionThresholdDbm, mv, path);
                else if (mk == "reselection_counter_min")
                    Assign(cfg.sps.reselectionCounterMin, mv, path);
                else if (mk == "reselection_counter_max")
                    Assign(cfg.sps.reselectionCounterMax, mv, path);
                else throw ConfigError(path, "unknown key");
            }
        }
        else if (key == "policy")
        {
            if (!value.is_object())
            {
                throw ConfigError(key, "must be an object");
            }
            for (const auto& [pk, pv] : value.items())
            {
                const std::string path = "policy." + pk;
                if (pk == "high_latency_budget_ms")
                    Assign(cfg.policy.highLatencyBudgetMs, pv, path);
                else if (pk == "normal_latency_budget_ms")
                    Assign(cfg.policy.normalLatencyBudgetMs, pv, path);
                else if (pk == "preemption_enabled") Assign(cfg.policy.preemptionEnabled, pv, path);
                else if (pk == "threshold_step_db") Assign(cfg.policy.thresholdStepDb, pv, path);
                else throw ConfigError(path, "unknown key");
            }
        }
        else
        {
            throw ConfigError(key, "unknown key");
        }
    }
}

nlohmann::json
ConfigToJson(const ScenarioConfig& cfg)
{
    return nlohmann::json{
        {"sigma", cfg.sigma},
        {"theta", cfg.theta},
        {"vehicle_count", cfg.vehicleCount},
        {"map_bounds_m", cfg.mapBoundsM},
        {"junction_count", cfg.junctionCount},
        {"bsm_rate_hz", cfg.bsmRateHz},
        {"bsm_size_bytes", cfg.bsmSizeBytes},
        {"sim_duration_s", cfg.simDurationS},
        {"seed", cfg.seed},
        {"awareness_range_m", cfg.awarenessRangeM},
        {"warmup_s", cfg.warmupS},
        {"static_vehicles", cfg.staticVehicles},
        {"speed_min_mps", cfg.speedMinMps},
        {"speed_max_mps", cfg.speedMaxMps},
        {"channel",
         {{"carrier_freq_ghz", cfg.channel.carrierFreqGhz},
          {"tx_power_dbm", cfg.channel.txPowerDbm},
          {"noise_figure_db", cfg.channel.noiseFigureDb},
          {"bandwidth_per_subchannel_hz", cfg.channel.bandwidthPerSubchannelHz},
          {"shadow_sigma_los_db", cfg.channel.shadowSigmaLosDb},
          {"shadow_sigma_nlos_db", cfg.channel.shadowSigmaNlosDb},
          {"antenna_height_m", cfg.channel.antennaHeightM},
          {"sinr_decode_threshold_db", cfg.channel.sinrDecodeThresholdDb}}},
        {"mac",
         {{"slot_duration_ms", cfg.grid.slotDurationMs},
          {"subchannels", cfg.grid.subchannels},
          {"resource_reservation_period_ms", cfg.sps.resourceReservationPeriodMs},
          {"rsrp_exclusion_threshold_dbm", cfg.sps.rsrpExclusionThresholdDbm},
          {"reselection_counter_min", cfg.sps.reselectionCounterMin},
          {"reselection_counter_max", cfg.sps.reselectionCounterMax}}},
        {"policy",
         {{"high_latency_budget_ms", cfg.policy.highLatencyBudgetMs},
          {"normal_latency_budget_ms", cfg.policy.normalLatencyBudgetMs},
          {"preemption_enabled", cfg.policy.preemptionEnabled},
          {"threshold_step_db", cfg.policy.thresholdStepDb}}},
    };
}

} // namespace v2xsim
