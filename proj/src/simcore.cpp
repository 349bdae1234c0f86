#include "v2xsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace v2xsim {

const char*
ToString(Outcome o)
{
    switch (o)
    {
    case Outcome::Delivered:
        return "Delivered";
    case Outcome::Expired:
        return "Expired";
    case Outcome::DecodeFailedAllAttempts:
        return "DecodeFailedAllAttempts";
    case Outcome::HalfDuplexMissed:
        return "HalfDuplexMissed";
    }
    return "?";
}

namespace {

constexpr long kMarginSlots = 2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PendingMessage
{
    long id{0};
    long genSlot{0};
    long txSlot{-1};
    std::vector<int> receivers;
};

struct VehicleState
{
    DistractionProfile profile;
    BudgetGrant grant;
    long budgetSlots{0};
    int phase{0};
    bool hasReservation{false};
    bool needsReselect{false};
    long nextTxSlot{-1};
    int subchannel{0};
    int counter{0};
    std::optional<PendingMessage> pending;
    SensingMap sensing;
    RngStream macStream;
};

/// Owns the per-run mutable world; strictly single-threaded. Events within a
/// slot execute in a fixed phase order (mobility, generation/selection,
/// transmission, counter update), vehicles always in id order.
class Simulation
{
  public:
    Simulation(const ScenarioConfig& cfg, bool captureTrace)
        : m_cfg(cfg),
          m_capture(captureTrace),
          m_periodSlots(PeriodSlots(cfg.grid, cfg.sps)),
          m_links(cfg.seed, cfg.channel)
    {
    }

    ScenarioResult Run();

  private:
    void Setup();
    void GenerateAndSelect(long slot);
    void ScheduleTransmission(int vehicle, long nowSlot);
    void PerformSelection(int vehicle, long nowSlot, long genSlot, const char* action);
    void ExpirePending(int vehicle, long nowSlot);
    void Bump(int vehicle, long nowSlot);
    void TransmitAndResolve(long slot);
    double RxPowerDbm(int tx, int rx);
    void Trace(long slot, int vehicle, const char* action, long resSlot, int sc, const char* cause);
    Summary Summarize() const;

    const ScenarioConfig& m_cfg;
    bool m_capture;
    int m_periodSlots;
    long m_genSlots{0};
    long m_totalSlots{0};
    double m_slotMs{0.0};
    long m_nextMsgId{0};

    RoadGraph m_graph;
    std::vector<KinematicState> m_states;
    std::vector<VehicleState> m_vehicles;
    RngStream m_mobilityStream;
    LinkStateTable m_links;
    std::optional<ResourceGrid> m_grid;

    std::vector<LatencyRecord> m_records;
    std::vector<MacTraceEvent> m_trace;
};

void
Simulation::Trace(long slot, int vehicle, const char* action, long resSlot, int sc, const char* cause)
{
    if (m_capture)
    {
        m_trace.push_back({slot, vehicle, action, resSlot, sc, cause});
    }
}

void
Simulation::Setup()
{
    m_slotMs = m_cfg.grid.slotDurationMs;
    m_genSlots = std::lround(m_cfg.simDurationS * 1000.0 / m_slotMs);
    const long tail = static_cast<long>(std::ceil(m_cfg.policy.normalLatencyBudgetMs / m_slotMs));
    m_totalSlots = m_genSlots + tail;

    m_graph = BuildDefaultMap(m_cfg.mapBoundsM, m_cfg.junctionCount);
    RngStream spawnStream = RngStream::Derive(m_cfg.seed, "spawn");
    m_states = SpawnVehicles(m_graph, m_cfg.vehicleCount, spawnStream, m_cfg.speedMinMps,
                             m_cfg.speedMaxMps);
    m_mobilityStream = RngStream::Derive(m_cfg.seed, "mobility");
    m_grid.emplace(m_cfg.grid, m_periodSlots);

    RngStream distractionStream = RngStream::Derive(m_cfg.seed, "distraction");
    RngStream phaseStream = RngStream::Derive(m_cfg.seed, "phase");
    const RayleighParams rayleigh{m_cfg.sigma};

    m_vehicles.resize(static_cast<std::size_t>(m_cfg.vehicleCount));
    for (int i = 0; i < m_cfg.vehicleCount; ++i)
    {
        VehicleState& v = m_vehicles[static_cast<std::size_t>(i)];
        v.profile.level = SampleDistraction(distractionStream, rayleigh);
        v.profile.priorityClass = Classify(v.profile.level, m_cfg.theta);
        v.grant = ApplyPriority(m_cfg.policy, v.profile.priorityClass);
        v.budgetSlots = static_cast<long>(std::floor(v.grant.budgetMs / m_slotMs));
        v.phase = static_cast<int>(phaseStream.NextBelow(static_cast<std::uint64_t>(m_periodSlots)));
        v.macStream = RngStream::Derive(m_cfg.seed, "mac", static_cast<std::uint64_t>(i));
    }
}

double
Simulation::RxPowerDbm(int tx, int rx)
{
    const double d = std::max(
        PairwiseDistance(m_states, static_cast<std::size_t>(tx), static_cast<std::size_t>(rx)), 1.0);
    const LinkState link = m_links.Link(tx, rx, d);
    const double pl = PathlossDb(d, link.los, m_cfg.channel);
    return ReceivedPowerDbm(m_cfg.channel.txPowerDbm, pl, link.shadowDb);
}

void
Simulation::GenerateAndSelect(long slot)
{
    if (slot >= m_genSlots)
    {
        return;
    }
    for (int i = 0; i < m_cfg.vehicleCount; ++i)
    {
        VehicleState& v = m_vehicles[static_cast<std::size_t>(i)];
        if (slot % m_periodSlots != v.phase)
        {
            continue;
        }
        PendingMessage msg;
        msg.id = ++m_nextMsgId;
        msg.genSlot = slot;
        for (int j = 0; j < m_cfg.vehicleCount; ++j)
        {
            if (j != i && PairwiseDistance(m_states, static_cast<std::size_t>(i),
                                           static_cast<std::size_t>(j)) <= m_cfg.awarenessRangeM)
            {
                msg.receivers.push_back(j);
            }
        }
        v.pending = std::move(msg);
        ScheduleTransmission(i, slot);
    }
}

void
Simulation::ScheduleTransmission(int vehicle, long nowSlot)
{
    VehicleState& v = m_vehicles[static_cast<std::size_t>(vehicle)];
    const long genSlot = v.pending->genSlot;
    const long windowEnd =
        genSlot + std::min(v.budgetSlots, static_cast<long>(m_periodSlots) - 1);

    if (v.hasReservation && !v.needsReselect)
    {
        if (v.nextTxSlot >= genSlot + kMarginSlots && v.nextTxSlot <= windowEnd)
        {
            v.pending->txSlot = v.nextTxSlot;
            return;
        }
        // Reservation drifted outside the message window; treat as a
        // reselection trigger.
        v.needsReselect = true;
    }
    PerformSelection(vehicle, nowSlot, genSlot,
                     v.hasReservation ? "reselect" : "select");
}

void
Simulation::PerformSelection(int vehicle, long nowSlot, long genSlot, const char* action)
{
    VehicleState& v = m_vehicles[static_cast<std::size_t>(vehicle)];
    const long windowEnd =
        genSlot + std::min(v.budgetSlots, static_cast<long>(m_periodSlots) - 1);
    if (nowSlot + kMarginSlots > windowEnd)
    {
        ExpirePending(vehicle, nowSlot);
        return;
    }

    const auto candidates =
        CandidateResources(m_cfg.grid, m_cfg.sps, nowSlot, v.grant.budgetMs, v.sensing,
                           m_cfg.policy.thresholdStepDb, v.profile.priorityClass,
                           v.grant.mayPreempt, windowEnd);
    const Resource pick = SelectResource(candidates, v.macStream);
    v.counter = m_cfg.sps.reselectionCounterMin +
                static_cast<int>(v.macStream.NextBelow(static_cast<std::uint64_t>(
                    m_cfg.sps.reselectionCounterMax - m_cfg.sps.reselectionCounterMin + 1)));

    const int slotInPeriod = static_cast<int>(pick.slot % m_periodSlots);
    if (v.grant.mayPreempt)
    {
        auto occupants = m_grid->Occupants(slotInPeriod, pick.subchannel);
        std::sort(occupants.begin(), occupants.end(),
                  [](const auto& a, const auto& b) { return a.vehicle < b.vehicle; });
        for (const auto& occ : occupants)
        {
            if (occ.priority == Priority::Normal)
            {
                Bump(occ.vehicle, nowSlot);
            }
        }
    }
    m_grid->Release(vehicle);
    m_grid->Reserve(slotInPeriod, pick.subchannel, vehicle, v.profile.priorityClass);
    v.hasReservation = true;
    v.needsReselect = false;
    v.nextTxSlot = pick.slot;
    v.subchannel = pick.subchannel;
    if (v.pending)
    {
        v.pending->txSlot = pick.slot;
    }
    Trace(nowSlot, vehicle, action, pick.slot, pick.subchannel, "");
}

void
Simulation::ExpirePending(int vehicle, long nowSlot)
{
    VehicleState& v = m_vehicles[static_cast<std::size_t>(vehicle)];
    const PendingMessage& msg = *v.pending;
    const double genTimeMs = static_cast<double>(msg.genSlot) * m_slotMs;
    if (genTimeMs >= m_cfg.warmupS * 1000.0)
    {
        for (int rx : msg.receivers)
        {
            m_records.push_back({msg.id, vehicle, rx, genTimeMs, kNaN, kNaN,
                                 v.profile.priorityClass, Outcome::Expired});
        }
    }
    Trace(nowSlot, vehicle, "expire", -1, -1, "expired");
    v.pending.reset();
}

void
Simulation::Bump(int vehicle, long nowSlot)
{
    VehicleState& v = m_vehicles[static_cast<std::size_t>(vehicle)];
    m_grid->Release(vehicle);
    v.hasReservation = false;
    v.needsReselect = true;
    Trace(nowSlot, vehicle, "preempt_bump", -1, -1, "preempted");
    if (v.pending && v.pending->txSlot > nowSlot)
    {
        // The yielded message is still in flight; pick a new resource in
        // what is left of its window, or expire it.
        PerformSelection(vehicle, nowSlot, v.pending->genSlot, "reselect");
    }
}

void
Simulation::TransmitAndResolve(long slot)
{
    std::vector<TxInfo> txs;
    for (int i = 0; i < m_cfg.vehicleCount; ++i)
    {
        VehicleState& v = m_vehicles[static_cast<std::size_t>(i)];
        if (v.pending && v.pending->txSlot == slot)
        {
            txs.push_back({i, v.subchannel, v.profile.priorityClass});
        }
    }
    if (txs.empty())
    {
        return;
    }

    const auto results = ResolveSlot(
        txs, m_cfg.vehicleCount, [this](int tx, int rx) { return RxPowerDbm(tx, rx); },
        m_cfg.channel);

    std::map<std::pair<int, int>, const DecodeResult*> byPair;
    for (const auto& r : results)
    {
        byPair[{r.tx, r.rx}] = &r;
        if (r.decoded)
        {
            // Receivers learn the reservation (and its priority) from the
            // decoded control information.
            m_vehicles[static_cast<std::size_t>(r.rx)].sensing.Record(
                static_cast<int>(slot % m_periodSlots),
                m_vehicles[static_cast<std::size_t>(r.tx)].subchannel, r.rsrpDbm,
                m_vehicles[static_cast<std::size_t>(r.tx)].profile.priorityClass, slot);
        }
    }

    std::vector<bool> transmitting(static_cast<std::size_t>(m_cfg.vehicleCount), false);
    for (const auto& tx : txs)
    {
        transmitting[static_cast<std::size_t>(tx.vehicle)] = true;
    }

    for (const auto& tx : txs)
    {
        VehicleState& v = m_vehicles[static_cast<std::size_t>(tx.vehicle)];
        const PendingMessage& msg = *v.pending;
        const double genTimeMs = static_cast<double>(msg.genSlot) * m_slotMs;
        const double rxTimeMs = static_cast<double>(slot) * m_slotMs;
        const bool measured = genTimeMs >= m_cfg.warmupS * 1000.0;
        for (int rx : msg.receivers)
        {
            if (!measured)
            {
                continue;
            }
            LatencyRecord rec;
            rec.msgId = msg.id;
            rec.txId = tx.vehicle;
            rec.rxId = rx;
            rec.genTimeMs = genTimeMs;
            rec.priority = v.profile.priorityClass;
            if (transmitting[static_cast<std::size_t>(rx)])
            {
                rec.rxTimeMs = kNaN;
                rec.latencyMs = kNaN;
                rec.outcome = Outcome::HalfDuplexMissed;
            }
            else if (byPair.at({tx.vehicle, rx})->decoded)
            {
                rec.rxTimeMs = rxTimeMs;
                rec.latencyMs = rxTimeMs - genTimeMs;
                rec.outcome = Outcome::Delivered;
            }
            else
            {
                rec.rxTimeMs = kNaN;
                rec.latencyMs = kNaN;
                rec.outcome = Outcome::DecodeFailedAllAttempts;
            }
            m_records.push_back(rec);
        }
        v.pending.reset();
        Trace(slot, tx.vehicle, "tx", slot, tx.subchannel, "");

        v.nextTxSlot += m_periodSlots;
        v.counter -= 1;
        if (v.counter <= 0)
        {
            v.needsReselect = true;
        }
    }
}

Summary
Simulation::Summarize() const
{
    Summary s;
    std::vector<double> allLat;
    std::vector<double> highLat;
    std::vector<double> normalLat;
    std::size_t highUnder20 = 0;

    auto fill = [](ClassStats& cs, std::size_t records, std::vector<double>& lat) {
        cs.records = records;
        cs.delivered = lat.size();
        cs.deliveryRatio =
            records > 0 ? static_cast<double>(lat.size()) / static_cast<double>(records) : kNaN;
        if (lat.empty())
        {
            cs.p10Ms = cs.p50Ms = cs.p90Ms = cs.p99Ms = kNaN;
            return;
        }
        cs.p10Ms = Percentile(lat, 0.10);
        cs.p50Ms = Percentile(lat, 0.50);
        cs.p90Ms = Percentile(lat, 0.90);
        cs.p99Ms = Percentile(lat, 0.99);
    };

    std::size_t nAll = 0;
    std::size_t nHigh = 0;
    std::size_t nNormal = 0;
    for (const auto& r : m_records)
    {
        ++nAll;
        const bool high = r.priority == Priority::High;
        (high ? nHigh : nNormal) += 1;
        if (r.outcome == Outcome::Delivered)
        {
            allLat.push_back(r.latencyMs);
            if (high)
            {
                highLat.push_back(r.latencyMs);
                if (r.latencyMs <= 20.0)
                {
                    ++highUnder20;
                }
            }
            else
            {
                normalLat.push_back(r.latencyMs);
            }
        }
    }
    const std::size_t highDelivered = highLat.size();
    fill(s.all, nAll, allLat);
    fill(s.high, nHigh, highLat);
    fill(s.normal, nNormal, normalLat);
    s.fracHighUnder20Ms = highDelivered > 0
                              ? static_cast<double>(highUnder20) / static_cast<double>(highDelivered)
                              : kNaN;
    for (const auto& v : m_vehicles)
    {
        if (v.profile.priorityClass == Priority::High)
        {
            ++s.highVehicleCount;
        }
    }
    s.realizedHighFraction =
        static_cast<double>(s.highVehicleCount) / static_cast<double>(m_cfg.vehicleCount);
    s.messagesGenerated = m_nextMsgId;
    return s;
}

ScenarioResult
Simulation::Run()
{
    Setup();
    const double dtS = m_slotMs / 1000.0;
    for (long slot = 0; slot < m_totalSlots; ++slot)
    {
        if (!m_cfg.staticVehicles)
        {
            StepMobility(m_graph, m_states, dtS, m_mobilityStream);
        }
        GenerateAndSelect(slot);
        TransmitAndResolve(slot);
    }
    ScenarioResult result;
    result.summary = Summarize();
    result.records = std::move(m_records);
    result.macTrace = std::move(m_trace);
    return result;
}

} // namespace

ScenarioResult
RunScenario(const ScenarioConfig& cfg, bool captureMacTrace)
{
    cfg.Validate();
    Simulation sim(cfg, captureMacTrace);
    return sim.Run();
}

double
Percentile(std::vector<double> values, double q)
{
    if (values.empty() || !(q > 0.0) || q > 1.0)
    {
        return kNaN;
    }
    std::sort(values.begin(), values.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

namespace {

double
MedianSkipNaN(std::vector<double> values)
{
    std::erase_if(values, [](double v) { return std::isnan(v); });
    if (values.empty())
    {
        return kNaN;
    }
    return Percentile(std::move(values), 0.50);
}

} // namespace

SweepResult
RunSweep(const ScenarioConfig& base,
         std::span<const double> thetas,
         std::span<const std::uint64_t> seeds,
         const std::function<void(const SweepRow&, const Summary&)>& onRow)
{
    if (thetas.empty())
    {
        throw ConfigError("thetas", "must not be empty");
    }
    if (seeds.empty())
    {
        throw ConfigError("seeds", "must not be empty");
    }
    SweepResult result;
    for (double theta : thetas)
    {
        std::vector<double> p50s;
        std::vector<double> p90s;
        std::vector<double> fracs;
        std::vector<double> ratios;
        for (std::uint64_t seed : seeds)
        {
            ScenarioConfig cfg = base;
            cfg.theta = theta;
            cfg.seed = seed;
            Summary summary;
            try
            {
                summary = RunScenario(cfg).summary;
            }
            catch (const std::exception& e)
            {
                throw std::runtime_error("sweep (theta=" + std::to_string(theta) +
                                         ", seed=" + std::to_string(seed) + "): " + e.what());
            }
            SweepRow row;
            row.theta = theta;
            row.seed = seed;
            row.p50HighMs = summary.high.p50Ms;
            row.p90HighMs = summary.high.p90Ms;
            row.fracHighUnder20Ms = summary.fracHighUnder20Ms;
            row.deliveryRatio = summary.all.deliveryRatio;
            row.realizedHighFraction = summary.realizedHighFraction;
            result.rows.push_back(row);
            if (onRow)
            {
                onRow(row, summary);
            }
            p50s.push_back(row.p50HighMs);
            p90s.push_back(row.p90HighMs);
            fracs.push_back(row.fracHighUnder20Ms);
            ratios.push_back(row.deliveryRatio);
        }
        SweepAggregate agg;
        agg.theta = theta;
        agg.p50HighMedianMs = MedianSkipNaN(p50s);
        agg.p90HighMedianMs = MedianSkipNaN(p90s);
        agg.fracHighUnder20Median = MedianSkipNaN(fracs);
        agg.deliveryRatioMedian = MedianSkipNaN(ratios);
        result.aggregates.push_back(agg);
    }
    return result;
}

std::vector<CdfBin>
LatencyCdf(std::span<const LatencyRecord> records,
           std::optional<Priority> classFilter,
           double binWidthMs)
{
    if (!(binWidthMs > 0.0))
    {
        throw std::invalid_argument("LatencyCdf: bin width must be > 0");
    }
    std::vector<double> latencies;
    for (const auto& r : records)
    {
        if (r.outcome != Outcome::Delivered)
        {
            continue;
        }
        if (classFilter && r.priority != *classFilter)
        {
            continue;
        }
        latencies.push_back(r.latencyMs);
    }
    if (latencies.empty())
    {
        throw std::runtime_error("LatencyCdf: no delivered records match the class filter");
    }
    const double maxLat = *std::max_element(latencies.begin(), latencies.end());
    const std::size_t nBins = static_cast<std::size_t>(std::floor(maxLat / binWidthMs)) + 1;
    std::vector<CdfBin> bins(nBins);
    for (std::size_t b = 0; b < nBins; ++b)
    {
        bins[b].leftMs = static_cast<double>(b) * binWidthMs;
        bins[b].rightMs = static_cast<double>(b + 1) * binWidthMs;
    }
    for (double lat : latencies)
    {
        std::size_t b = static_cast<std::size_t>(std::floor(lat / binWidthMs));
        b = std::min(b, nBins - 1);
        bins[b].count += 1;
    }
    std::size_t cum = 0;
    for (auto& bin : bins)
    {
        cum += bin.count;
        bin.cdf = static_cast<double>(cum) / static_cast<double>(latencies.size());
    }
    return bins;
}

} // namespace v2xsim
