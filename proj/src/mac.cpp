#include "v2xsim/mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace v2xsim {

namespace {

constexpr long kProcessingMarginSlots = 2;
constexpr double kMinCandidateFraction = 0.2;

std::uint64_t
CellKey(int slotInPeriod, int subchannel)
{
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(slotInPeriod)) << 16) |
           static_cast<std::uint16_t>(subchannel);
}

} // namespace

int
PeriodSlots(const GridParams& grid, const SpsConfig& sps)
{
    const double slots = sps.resourceReservationPeriodMs / grid.slotDurationMs;
    const long rounded = std::lround(slots);
    if (rounded < 1 || std::abs(slots - static_cast<double>(rounded)) > 1e-9)
    {
        throw std::invalid_argument("SpsConfig: reservation period must be a whole number of slots");
    }
    return static_cast<int>(rounded);
}

BudgetGrant
ApplyPriority(const PriorityPolicy& policy, Priority priorityClass)
{
    if (priorityClass == Priority::High)
    {
        return {policy.highLatencyBudgetMs, policy.preemptionEnabled};
    }
    return {policy.normalLatencyBudgetMs, false};
}

void
SensingMap::Record(int slotInPeriod, int subchannel, double rsrpDbm, Priority prio, long heardSlot)
{
    m_entries[CellKey(slotInPeriod, subchannel)] = SensedEntry{rsrpDbm, prio, heardSlot};
}

const SensedEntry*
SensingMap::Query(int slotInPeriod, int subchannel, long nowSlot, int periodSlots) const
{
    auto it = m_entries.find(CellKey(slotInPeriod, subchannel));
    if (it == m_entries.end())
    {
        return nullptr;
    }
    if (it->second.heardSlot <= nowSlot - periodSlots)
    {
        return nullptr; // stale, outside the trailing sensing window
    }
    return &it->second;
}

void
SensingMap::Clear()
{
    m_entries.clear();
}

std::vector<Resource>
CandidateResources(const GridParams& grid,
                   const SpsConfig& sps,
                   long nowSlot,
                   double budgetMs,
                   const SensingMap& sensing,
                   double thresholdStepDb,
                   Priority ownPriority,
                   bool mayPreempt,
                   long windowEndCap)
{
    if (!(budgetMs > 0.0))
    {
        throw std::invalid_argument("CandidateResources: budget must be > 0");
    }
    const long t2 = static_cast<long>(std::floor(budgetMs / grid.slotDurationMs));
    if (t2 < kProcessingMarginSlots)
    {
        throw std::invalid_argument("CandidateResources: budget shorter than the processing margin");
    }
    long windowEnd = nowSlot + t2;
    if (windowEndCap >= 0)
    {
        windowEnd = std::min(windowEnd, windowEndCap);
    }
    const long windowStart = nowSlot + kProcessingMarginSlots;
    if (windowEnd < windowStart)
    {
        throw std::invalid_argument("CandidateResources: empty candidate window");
    }

    const int periodSlots = PeriodSlots(grid, sps);
    const std::size_t windowSize =
        static_cast<std::size_t>(windowEnd - windowStart + 1) * static_cast<std::size_t>(grid.subchannels);
    const std::size_t minSurvivors = static_cast<std::size_t>(
        std::ceil(kMinCandidateFraction * static_cast<double>(windowSize)));

    double threshold = sps.rsrpExclusionThresholdDbm;
    std::vector<Resource> survivors;
    for (;;)
    {
        survivors.clear();
        for (long slot = windowStart; slot <= windowEnd; ++slot)
        {
            const int slotInPeriod = static_cast<int>(slot % periodSlots);
            for (int sc = 0; sc < grid.subchannels; ++sc)
            {
                const SensedEntry* entry = sensing.Query(slotInPeriod, sc, nowSlot, periodSlots);
                bool excluded = false;
                if (entry != nullptr && entry->rsrpDbm > threshold)
                {
                    const bool claimable = mayPreempt && ownPriority == Priority::High &&
                                           entry->priority == Priority::Normal;
                    excluded = !claimable;
                }
                if (!excluded)
                {
                    survivors.push_back({slot, sc});
                }
            }
        }
        if (survivors.size() >= minSurvivors)
        {
            return survivors;
        }
        threshold += thresholdStepDb;
    }
}

Resource
SelectResource(std::span<const Resource> candidates, RngStream& stream)
{
    if (candidates.empty())
    {
        throw std::invalid_argument("SelectResource: empty candidate set");
    }
    return candidates[stream.NextBelow(candidates.size())];
}

void
ResourceGrid::Reserve(int slotInPeriod, int subchannel, int vehicle, Priority prio)
{
    Release(vehicle);
    const std::uint64_t key = CellKey(slotInPeriod, subchannel);
    m_cells[key].push_back({vehicle, prio});
    m_byVehicle[vehicle] = key;
}

void
ResourceGrid::Release(int vehicle)
{
    auto it = m_byVehicle.find(vehicle);
    if (it == m_byVehicle.end())
    {
        return;
    }
    auto& occupants = m_cells[it->second];
    std::erase_if(occupants, [vehicle](const Occupant& o) { return o.vehicle == vehicle; });
    m_byVehicle.erase(it);
}

std::vector<ResourceGrid::Occupant>
ResourceGrid::Occupants(int slotInPeriod, int subchannel) const
{
    auto it = m_cells.find(CellKey(slotInPeriod, subchannel));
    if (it == m_cells.end())
    {
        return {};
    }
    return it->second;
}

std::optional<Resource>
ResourceGrid::ReservationOf(int vehicle) const
{
    auto it = m_byVehicle.find(vehicle);
    if (it == m_byVehicle.end())
    {
        return std::nullopt;
    }
    return Resource{static_cast<long>(it->second >> 16),
                    static_cast<int>(it->second & 0xffff)};
}

std::vector<DecodeResult>
ResolveSlot(std::span<const TxInfo> transmitters,
            int vehicleCount,
            const std::function<double(int, int)>& rxPowerDbm,
            const ChannelConfig& cfg)
{
    std::vector<bool> transmitting(static_cast<std::size_t>(vehicleCount), false);
    for (const auto& tx : transmitters)
    {
        transmitting[static_cast<std::size_t>(tx.vehicle)] = true;
    }

    std::vector<DecodeResult> results;
    std::vector<double> interferers;
    for (const auto& tx : transmitters)
    {
        for (int rx = 0; rx < vehicleCount; ++rx)
        {
            if (transmitting[static_cast<std::size_t>(rx)])
            {
                continue; // half-duplex: a transmitter receives nothing
            }
            const double signal = rxPowerDbm(tx.vehicle, rx);
            interferers.clear();
            for (const auto& other : transmitters)
            {
                if (other.vehicle != tx.vehicle && other.subchannel == tx.subchannel)
                {
                    interferers.push_back(rxPowerDbm(other.vehicle, rx));
                }
            }
            const double sinr = SinrDb(signal, interferers, cfg);
            results.push_back({tx.vehicle, rx, signal, sinr, Decode(sinr, cfg)});
        }
    }
    return results;
}

} // namespace v2xsim
