#include "v2xsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace v2xsim {

double
LosProbability(double d2dM)
{
    if (d2dM < 0.0)
    {
        throw std::invalid_argument("LosProbability: distance must be >= 0");
    }
    if (d2dM <= 18.0)
    {
        return 1.0;
    }
    return 18.0 / d2dM + std::exp(-d2dM / 36.0) * (1.0 - 18.0 / d2dM);
}

double
PathlossDb(double d3dM, bool los, const ChannelConfig& cfg)
{
    if (d3dM < 1.0)
    {
        throw std::invalid_argument("PathlossDb: distance must be >= 1 m");
    }
    const double logD = std::log10(d3dM);
    const double logF = std::log10(cfg.carrierFreqGhz);
    const double plLos = 32.4 + 21.0 * logD + 20.0 * logF;
    if (los)
    {
        return plLos;
    }
    const double plNlos =
        35.3 * logD + 22.4 + 21.3 * logF - 0.3 * (cfg.antennaHeightM - 1.5);
    return std::max(plLos, plNlos);
}

double
ReceivedPowerDbm(double txDbm, double pathlossDb, double shadowDb)
{
    return txDbm - pathlossDb - shadowDb;
}

double
NoisePowerDbm(const ChannelConfig& cfg)
{
    return -174.0 + cfg.noiseFigureDb + 10.0 * std::log10(cfg.bandwidthPerSubchannelHz);
}

namespace {

double
DbmToMw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

} // namespace

double
SinrDb(double signalDbm, std::span<const double> interferersDbm, const ChannelConfig& cfg)
{
    double denom = DbmToMw(NoisePowerDbm(cfg));
    for (double i : interferersDbm)
    {
        denom += DbmToMw(i);
    }
    return 10.0 * std::log10(DbmToMw(signalDbm) / denom);
}

bool
Decode(double sinrDb, const ChannelConfig& cfg)
{
    return sinrDb >= cfg.sinrDecodeThresholdDb;
}

namespace {

std::uint64_t
PairKey(int a, int b)
{
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

} // namespace

bool
LinkStateTable::Los(int a, int b, double d2dM)
{
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    const std::uint64_t key = PairKey(lo, hi);
    auto it = m_los.find(key);
    if (it != m_los.end())
    {
        return it->second;
    }
    RngStream draw(HashMix(m_seed, 0x105ull, key));
    const bool los = draw.NextUniform() < LosProbability(d2dM);
    m_los.emplace(key, los);
    return los;
}

double
LinkStateTable::ShadowDb(int tx, int rx, bool los)
{
    const std::uint64_t key = PairKey(tx, rx);
    auto it = m_shadow.find(key);
    if (it != m_shadow.end())
    {
        return it->second;
    }
    RngStream draw(HashMix(m_seed, 0x5fadull, key));
    const double sigma = los ? m_cfg.shadowSigmaLosDb : m_cfg.shadowSigmaNlosDb;
    const double shadow = sigma * draw.NextGaussian();
    m_shadow.emplace(key, shadow);
    return shadow;
}

LinkState
LinkStateTable::Link(int tx, int rx, double d2dM)
{
    LinkState state;
    state.los = Los(tx, rx, d2dM);
    state.shadowDb = ShadowDb(tx, rx, state.los);
    return state;
}

} // namespace v2xsim
