#include "v2xsim/distraction.hpp"

#include <cmath>
#include <stdexcept>

namespace v2xsim {

const char*
ToString(Priority p)
{
    return p == Priority::High ? "High" : "Normal";
}

namespace {

void
CheckSigma(const RayleighParams& params)
{
    if (!(params.sigma > 0.0))
    {
        throw std::invalid_argument("RayleighParams: sigma must be > 0");
    }
}

} // namespace

double
RayleighPdf(double x, const RayleighParams& params)
{
    CheckSigma(params);
    if (x < 0.0)
    {
        throw std::invalid_argument("RayleighPdf: x must be >= 0");
    }
    const double s2 = params.sigma * params.sigma;
    return (x / s2) * std::exp(-(x * x) / (2.0 * s2));
}

double
TailProbability(double theta, const RayleighParams& params)
{
    CheckSigma(params);
    if (theta < 0.0)
    {
        throw std::invalid_argument("TailProbability: theta must be >= 0");
    }
    const double s2 = params.sigma * params.sigma;
    return std::exp(-(theta * theta) / (2.0 * s2));
}

double
SampleDistraction(double u, const RayleighParams& params)
{
    CheckSigma(params);
    return params.sigma * std::sqrt(-2.0 * std::log1p(-u));
}

double
SampleDistraction(RngStream& stream, const RayleighParams& params)
{
    return SampleDistraction(stream.NextUniform(), params);
}

Priority
Classify(double level, double theta)
{
    return level >= theta ? Priority::High : Priority::Normal;
}

RayleighParams
FitSigma(std::span<const double> levels)
{
    if (levels.empty())
    {
        throw std::invalid_argument("FitSigma: empty sample set");
    }
    double sumSq = 0.0;
    for (double x : levels)
    {
        if (x < 0.0)
        {
            throw std::invalid_argument("FitSigma: negative sample");
        }
        sumSq += x * x;
    }
    if (sumSq <= 0.0)
    {
        throw std::invalid_argument("FitSigma: all samples are zero, sigma must be > 0");
    }
    return RayleighParams{std::sqrt(sumSq / (2.0 * static_cast<double>(levels.size())))};
}

} // namespace v2xsim
