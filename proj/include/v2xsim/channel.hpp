#pragma once

#include "v2xsim/rng.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>

namespace v2xsim {

/// UMi street-canyon link parameters. Numeric defaults follow common
/// NR-V2X evaluation practice and are all configurable.
struct ChannelConfig
{
    double carrierFreqGhz{3.5};
    double txPowerDbm{23.0};
    double noiseFigureDb{9.0};
    double bandwidthPerSubchannelHz{2.5e6};
    double shadowSigmaLosDb{4.0};
    double shadowSigmaNlosDb{7.82};
    double antennaHeightM{1.5};
    double sinrDecodeThresholdDb{2.8};
};

/// Frozen per-pair link condition for one run.
struct LinkState
{
    bool los{true};
    double shadowDb{0.0};
};

/// UMi LOS probability: 1 for d2d <= 18 m, else 18/d + exp(-d/36)(1 - 18/d).
double LosProbability(double d2dM);

/// UMi street-canyon pathloss, below-breakpoint LOS regime.
/// LOS:  32.4 + 21 log10(d) + 20 log10(f_GHz)
/// NLOS: max(PL_LOS, 35.3 log10(d) + 22.4 + 21.3 log10(f_GHz) - 0.3 (h_UT - 1.5))
/// Throws if d3d < 1 m.
double PathlossDb(double d3dM, bool los, const ChannelConfig& cfg);

double ReceivedPowerDbm(double txDbm, double pathlossDb, double shadowDb);

/// Thermal noise at the receiver: -174 dBm/Hz + NF + 10 log10(bandwidth).
double NoisePowerDbm(const ChannelConfig& cfg);

/// 10 log10(signal / (sum of interferers + noise)), all in linear mW.
/// With no interferers this reduces to SNR.
double SinrDb(double signalDbm, std::span<const double> interferersDbm, const ChannelConfig& cfg);

/// Deterministic threshold decode: true iff sinr >= decode threshold.
bool Decode(double sinrDb, const ChannelConfig& cfg);

/// Per-run cache of LOS states (one draw per unordered pair, frozen at the
/// distance of the first query) and shadow fading (one draw per directed
/// pair, sigma chosen by the pair's LOS state). All draws are pure
/// functions of the run seed and the vehicle ids.
class LinkStateTable
{
  public:
    LinkStateTable(std::uint64_t seed, ChannelConfig cfg)
        : m_seed(seed),
          m_cfg(cfg)
    {
    }

    bool Los(int a, int b, double d2dM);
    double ShadowDb(int tx, int rx, bool los);
    LinkState Link(int tx, int rx, double d2dM);

  private:
    std::uint64_t m_seed;
    ChannelConfig m_cfg;
    std::unordered_map<std::uint64_t, bool> m_los;
    std::unordered_map<std::uint64_t, double> m_shadow;
};

} // namespace v2xsim
