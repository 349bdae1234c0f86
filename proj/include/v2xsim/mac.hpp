#pragma once

#include "v2xsim/channel.hpp"
#include "v2xsim/distraction.hpp"
#include "v2xsim/rng.hpp"

#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace v2xsim {

/// One sidelink resource: an absolute slot index and a subchannel.
struct Resource
{
    long slot{0};
    int subchannel{0};

    bool operator==(const Resource&) const = default;
};

struct GridParams
{
    double slotDurationMs{0.5}; ///< 30 kHz numerology; 1.0 for the LTE-style mode
    int subchannels{4};
};

struct SpsConfig
{
    double resourceReservationPeriodMs{100.0}; ///< matches the 10 Hz BSM period
    double rsrpExclusionThresholdDbm{-110.0};
    int reselectionCounterMin{5};
    int reselectionCounterMax{15};
};

int PeriodSlots(const GridParams& grid, const SpsConfig& sps);

struct PriorityPolicy
{
    double highLatencyBudgetMs{20.0}; ///< the BSM bound
    double normalLatencyBudgetMs{100.0};
    bool preemptionEnabled{true};
    double thresholdStepDb{3.0};
};

struct BudgetGrant
{
    double budgetMs{0.0};
    bool mayPreempt{false};
};

/// High class gets the short budget and, when enabled, the right to claim a
/// resource reserved by a Normal-class vehicle. Equal classes never preempt.
BudgetGrant ApplyPriority(const PriorityPolicy& policy, Priority priorityClass);

/// One sensed reservation, keyed by (slot within period, subchannel).
/// The priority comes from the decoded control information.
struct SensedEntry
{
    double rsrpDbm{0.0};
    Priority priority{Priority::Normal};
    long heardSlot{0};
};

/// Per-vehicle sensing history: decoded reservations from the trailing
/// reservation period, projected one period forward.
class SensingMap
{
  public:
    void Record(int slotInPeriod, int subchannel, double rsrpDbm, Priority prio, long heardSlot);

    /// Returns the entry for a resource if it was heard within the trailing
    /// period ending at nowSlot, else nullptr.
    const SensedEntry* Query(int slotInPeriod, int subchannel, long nowSlot, int periodSlots) const;

    void Clear();

  private:
    std::unordered_map<std::uint64_t, SensedEntry> m_entries;
};

/// Sensing-based candidate enumeration over the window
/// [nowSlot + 2, nowSlot + budgetMs/slotDuration], optionally capped at
/// windowEndCap. Resources whose sensed RSRP exceeds the exclusion
/// threshold are removed, except that a preempting High-class requester
/// keeps resources sensed with Normal priority (claimable). If fewer than
/// 20% of the window survives, the threshold is raised by thresholdStepDb
/// and the exclusion repeats. Throws if the budget is shorter than the
/// 2-slot processing margin.
std::vector<Resource> CandidateResources(const GridParams& grid,
                                         const SpsConfig& sps,
                                         long nowSlot,
                                         double budgetMs,
                                         const SensingMap& sensing,
                                         double thresholdStepDb,
                                         Priority ownPriority = Priority::Normal,
                                         bool mayPreempt = false,
                                         long windowEndCap = -1);

/// Uniform random choice among the candidates via the stream.
/// Throws on an empty set.
Resource SelectResource(std::span<const Resource> candidates, RngStream& stream);

/// Reservation registry: who holds which (slot-in-period, subchannel).
/// A vehicle holds at most one reservation at a time.
class ResourceGrid
{
  public:
    struct Occupant
    {
        int vehicle{0};
        Priority priority{Priority::Normal};
    };

    ResourceGrid(GridParams params, int periodSlots)
        : m_params(params),
          m_periodSlots(periodSlots)
    {
    }

    const GridParams& Params() const { return m_params; }
    int Periods() const { return m_periodSlots; }

    void Reserve(int slotInPeriod, int subchannel, int vehicle, Priority prio);
    void Release(int vehicle);
    std::vector<Occupant> Occupants(int slotInPeriod, int subchannel) const;
    std::optional<Resource> ReservationOf(int vehicle) const;

  private:
    GridParams m_params;
    int m_periodSlots;
    std::unordered_map<std::uint64_t, std::vector<Occupant>> m_cells;
    std::unordered_map<int, std::uint64_t> m_byVehicle;
};

struct TxInfo
{
    int vehicle{0};
    int subchannel{0};
    Priority priority{Priority::Normal};
};

struct DecodeResult
{
    int tx{0};
    int rx{0};
    double rsrpDbm{0.0};
    double sinrDb{0.0};
    bool decoded{false};
};

/// Resolves one slot: every vehicle that is not transmitting attempts to
/// decode every transmission, with co-subchannel transmissions as
/// interferers. Transmitting vehicles receive nothing (half-duplex).
/// rxPowerDbm(tx, rx) supplies the received power for the current geometry.
/// Results are ordered by (tx, rx).
std::vector<DecodeResult> ResolveSlot(std::span<const TxInfo> transmitters,
                                      int vehicleCount,
                                      const std::function<double(int, int)>& rxPowerDbm,
                                      const ChannelConfig& cfg);

} // namespace v2xsim
