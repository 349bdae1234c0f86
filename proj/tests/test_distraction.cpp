#include "v2xsim/distraction.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace v2xsim;

namespace {

const RayleighParams kSigma2{2.0};

/// Independent oracle: composite Simpson quadrature of the density.
double
IntegratePdf(double lo, double hi, const RayleighParams& params, int intervals = 200000)
{
    const double h = (hi - lo) / intervals;
    double sum = RayleighPdf(lo, params) + RayleighPdf(hi, params);
    for (int i = 1; i < intervals; ++i)
    {
        sum += RayleighPdf(lo + i * h, params) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("rayleigh pdf closed-form values")
{
    CHECK(RayleighPdf(0.0, kSigma2) == 0.0);
    // e^{-1/2}/2 and e^{-2}, evaluated independently
    CHECK(RayleighPdf(2.0, kSigma2) == doctest::Approx(std::exp(-0.5) / 2.0).epsilon(1e-12));
    CHECK(RayleighPdf(2.0, kSigma2) == doctest::Approx(0.303265).epsilon(1e-5));
    CHECK(RayleighPdf(4.0, kSigma2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(RayleighPdf(-0.1, kSigma2), std::invalid_argument);
    CHECK_THROWS_AS(RayleighPdf(1.0, RayleighParams{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(RayleighPdf(1.0, RayleighParams{-1.0}), std::invalid_argument);
}

TEST_CASE("rayleigh pdf peaks at sigma")
{
    double best = -1.0;
    double bestX = -1.0;
    for (int i = 0; i <= 10000; ++i)
    {
        const double x = i * 1e-3;
        const double p = RayleighPdf(x, kSigma2);
        if (p > best)
        {
            best = p;
            bestX = x;
        }
    }
    CHECK(bestX == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("tail probability matches the closed form")
{
    CHECK(TailProbability(0.0, kSigma2) == 1.0);
    CHECK(std::abs(TailProbability(2.0, kSigma2) - 0.6065) < 5e-5);
    CHECK(std::abs(TailProbability(4.0, kSigma2) - 0.1353) < 5e-5);
    CHECK(std::abs(TailProbability(8.0, kSigma2) - 3.3546e-4) < 5e-5);
    CHECK_THROWS_AS(TailProbability(-1.0, kSigma2), std::invalid_argument);
}

TEST_CASE("tail probability is strictly decreasing")
{
    double prev = TailProbability(0.0, kSigma2);
    for (int i = 1; i <= 200; ++i)
    {
        const double cur = TailProbability(i * 0.05, kSigma2);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("quadrature of the density reproduces the tail")
{
    for (double theta : {0.0, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0})
    {
        const double viaQuadrature = IntegratePdf(theta, 10.0 * kSigma2.sigma, kSigma2);
        CHECK(std::abs(viaQuadrature - TailProbability(theta, kSigma2)) < 1e-6);
    }
}

TEST_CASE("inverse-CDF sampling")
{
    CHECK(SampleDistraction(0.0, kSigma2) == 0.0);
    // CDF(4) = 1 - e^{-2}, so u = 1 - e^{-2} maps back to 4
    CHECK(SampleDistraction(1.0 - std::exp(-2.0), kSigma2) == doctest::Approx(4.0).epsilon(1e-12));

    RngStream a = RngStream::Derive(42, "distraction");
    RngStream b = RngStream::Derive(42, "distraction");
    for (int i = 0; i < 100; ++i)
    {
        CHECK(SampleDistraction(a, kSigma2) == SampleDistraction(b, kSigma2));
    }
}

TEST_CASE("sampler fidelity: mean and tail frequency over 1e6 draws")
{
    RngStream stream = RngStream::Derive(7, "distraction");
    const int n = 1000000;
    double sum = 0.0;
    int atLeast4 = 0;
    for (int i = 0; i < n; ++i)
    {
        const double x = SampleDistraction(stream, kSigma2);
        sum += x;
        if (x >= 4.0)
        {
            ++atLeast4;
        }
    }
    const double trueMean = kSigma2.sigma * std::sqrt(std::numbers::pi / 2.0);
    CHECK(std::abs(sum / n - trueMean) < 0.01);
    CHECK(std::abs(static_cast<double>(atLeast4) / n - 0.1353) < 0.003);
}

TEST_CASE("classification threshold is inclusive")
{
    CHECK(Classify(4.0, 4.0) == Priority::High);
    CHECK(Classify(0.0, 2.0) == Priority::Normal);
    CHECK(Classify(8.1, 8.0) == Priority::High);
    CHECK(Classify(3.999, 4.0) == Priority::Normal);
    CHECK(Classify(0.0, 0.0) == Priority::High); // theta = 0 marks everyone
}

TEST_CASE("sigma MLE")
{
    const std::vector<double> four{2.0, 2.0, 2.0, 2.0};
    CHECK(FitSigma(four).sigma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(FitSigma(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(FitSigma(std::vector<double>{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(FitSigma(std::vector<double>{1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("sigma MLE is consistent on 1e5 samples")
{
    RngStream stream = RngStream::Derive(11, "distraction");
    std::vector<double> samples;
    samples.reserve(100000);
    for (int i = 0; i < 100000; ++i)
    {
        samples.push_back(SampleDistraction(stream, kSigma2));
    }
    const double fitted = FitSigma(samples).sigma;
    CHECK(fitted > 1.99);
    CHECK(fitted < 2.01);
}
