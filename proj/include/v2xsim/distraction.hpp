#pragma once

#include "v2xsim/rng.hpp"

#include <span>

namespace v2xsim {

/// Transmission priority class of a vehicle. High is assigned to vehicles
/// whose distraction level reaches the scenario threshold.
enum class Priority
{
    Normal,
    High,
};

const char* ToString(Priority p);

/// Scale parameter of the Rayleigh distraction field.
struct RayleighParams
{
    double sigma{2.0};
};

/// Per-vehicle distraction state. The level is drawn once at scenario
/// initialization and held constant for the run.
struct DistractionProfile
{
    double level{0.0};
    Priority priorityClass{Priority::Normal};
};

/// Rayleigh density (x/sigma^2) * exp(-x^2 / (2 sigma^2)) for x >= 0.
/// Throws std::invalid_argument on x < 0 or sigma <= 0.
double RayleighPdf(double x, const RayleighParams& params);

/// P(X >= theta) = exp(-theta^2 / (2 sigma^2)). Equals 1 at theta = 0.
double TailProbability(double theta, const RayleighParams& params);

/// Inverse-CDF transform of a single uniform u in [0, 1):
/// sigma * sqrt(-2 ln(1 - u)). A fixed uniform stream reproduces the
/// sample sequence exactly.
double SampleDistraction(double u, const RayleighParams& params);
double SampleDistraction(RngStream& stream, const RayleighParams& params);

/// High iff level >= theta. The threshold is inclusive.
Priority Classify(double level, double theta);

/// Maximum-likelihood fit sigma = sqrt(sum(x_i^2) / (2n)).
/// Throws on empty or all-zero input.
RayleighParams FitSigma(std::span<const double> levels);

} // namespace v2xsim
