#include "v2xsim/cli_app.hpp"

#include "v2xsim/simcore.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace v2xsim {

namespace {

namespace fs = std::filesystem;

std::string
Timestamp()
{
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::string
DefaultOutDir()
{
    if (const char* env = std::getenv("V2XSIM_OUT"))
    {
        return env;
    }
    return "out";
}

nlohmann::json
LoadConfigFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("config", "cannot open file: " + path);
    }
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    // A run manifest embeds the resolved config; accept it directly so a
    // manifest is always sufficient for bit-exact reproduction.
    if (j.is_object() && j.contains("config") && j.contains("tool_version"))
    {
        return j["config"];
    }
    return j;
}

void
WriteTextFile(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

void
WriteManifest(const fs::path& outDir,
              const ScenarioConfig& cfg,
              const std::vector<std::uint64_t>& seeds)
{
    nlohmann::json manifest;
    manifest["tool_version"] = V2XSIM_VERSION;
    manifest["config"] = ConfigToJson(cfg);
    manifest["seeds"] = seeds;
    manifest["out_dir"] = outDir.string();
    manifest["started_at"] = Timestamp();
    WriteTextFile(outDir / "manifest.json", manifest.dump(2) + "\n");
}

std::string
FormatTheta(double theta)
{
    std::ostringstream os;
    os << theta;
    return os.str();
}

struct RunOptions
{
    std::string configPath;
    std::optional<double> theta;
    std::optional<double> sigma;
    std::optional<int> vehicles;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    bool staticVehicles{false};
    bool exportMap{false};
    bool macTrace{false};
    std::string outDir;
};

ScenarioConfig
ResolveConfig(const RunOptions& opt)
{
    ScenarioConfig cfg;
    if (!opt.configPath.empty())
    {
        ApplyConfigJson(cfg, LoadConfigFile(opt.configPath));
    }
    if (opt.theta) cfg.theta = *opt.theta;
    if (opt.sigma) cfg.sigma = *opt.sigma;
    if (opt.vehicles) cfg.vehicleCount = *opt.vehicles;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.duration) cfg.simDurationS = *opt.duration;
    if (opt.staticVehicles) cfg.staticVehicles = true;
    cfg.Validate();
    return cfg;
}

int
CmdRun(const RunOptions& opt)
{
    const ScenarioConfig cfg = ResolveConfig(opt);
    const fs::path outDir(opt.outDir);
    fs::create_directories(outDir);
    WriteManifest(outDir, cfg, {cfg.seed});

    const ScenarioResult result = RunScenario(cfg, opt.macTrace);

    {
        std::ofstream os(outDir / "records.csv", std::ios::binary);
        WriteRecordsCsv(os, result.records);
    }
    WriteTextFile(outDir / "summary.json", SummaryToJson(result.summary).dump(2) + "\n");
    try
    {
        const auto bins = LatencyCdf(result.records, std::nullopt, 1.0);
        std::ofstream os(outDir / "cdf.csv", std::ios::binary);
        WriteCdfCsv(os, bins);
    }
    catch (const std::runtime_error&)
    {
        WriteTextFile(outDir / "cdf.csv", "bin_left_ms,bin_right_ms,count,cdf\n");
    }
    if (opt.macTrace)
    {
        std::ofstream os(outDir / "mac_trace.csv", std::ios::binary);
        WriteMacTraceCsv(os, result.macTrace);
    }
    if (opt.exportMap)
    {
        const RoadGraph graph = BuildDefaultMap(cfg.mapBoundsM, cfg.junctionCount);
        WriteTextFile(outDir / "map.json", ToJson(graph).dump(2) + "\n");
    }

    std::cout << "run: theta=" << cfg.theta << " sigma=" << cfg.sigma
              << " vehicles=" << cfg.vehicleCount << " seed=" << cfg.seed << "\n"
              << "  high fraction: " << result.summary.realizedHighFraction
              << "  p50 high: " << result.summary.high.p50Ms << " ms"
              << "  delivery ratio: " << result.summary.all.deliveryRatio << "\n"
              << "  outputs in " << outDir.string() << "\n";
    return 0;
}

int
CmdSweep(const RunOptions& opt, const std::string& thetasArg, int seedCount)
{
    ScenarioConfig base;
    if (!opt.configPath.empty())
    {
        ApplyConfigJson(base, LoadConfigFile(opt.configPath));
    }
    if (opt.sigma) base.sigma = *opt.sigma;
    if (opt.vehicles) base.vehicleCount = *opt.vehicles;
    if (opt.duration) base.simDurationS = *opt.duration;
    if (opt.staticVehicles) base.staticVehicles = true;

    std::vector<double> thetas;
    std::stringstream ss(thetasArg);
    std::string tok;
    while (std::getline(ss, tok, ','))
    {
        if (tok.empty())
        {
            continue;
        }
        try
        {
            std::size_t pos = 0;
            const double t = std::stod(tok, &pos);
            if (pos != tok.size() || t < 0.0 || !std::isfinite(t))
            {
                throw std::invalid_argument(tok);
            }
            thetas.push_back(t);
        }
        catch (const std::exception&)
        {
            throw ConfigError("thetas", "not a non-negative real: '" + tok + "'");
        }
    }
    if (thetas.empty())
    {
        throw ConfigError("thetas", "must not be empty");
    }
    if (seedCount < 1)
    {
        throw ConfigError("seeds", "must be >= 1");
    }
    std::vector<std::uint64_t> seeds;
    for (int s = 1; s <= seedCount; ++s)
    {
        seeds.push_back(static_cast<std::uint64_t>(s));
    }

    {
        ScenarioConfig probe = base;
        probe.theta = thetas.front();
        probe.seed = seeds.front();
        probe.Validate();
    }

    const fs::path outDir(opt.outDir);
    fs::create_directories(outDir);
    WriteManifest(outDir, base, seeds);

    const SweepResult sweep =
        RunSweep(base, thetas, seeds, [&](const SweepRow& row, const Summary& summary) {
            const std::string name = "summary_theta" + FormatTheta(row.theta) + "_seed" +
                                     std::to_string(row.seed) + ".json";
            WriteTextFile(outDir / name, SummaryToJson(summary).dump(2) + "\n");
        });

    {
        std::ofstream os(outDir / "sweep.csv", std::ios::binary);
        WriteSweepCsv(os, sweep);
    }
    for (const auto& agg : sweep.aggregates)
    {
        std::cout << "theta=" << agg.theta << "  p50_high(median over seeds)=" << agg.p50HighMedianMs
                  << " ms  frac_high<=20ms=" << agg.fracHighUnder20Median
                  << "  delivery_ratio=" << agg.deliveryRatioMedian << "\n";
    }
    std::cout << "sweep outputs in " << outDir.string() << "\n";
    return 0;
}

int
CmdCalibrate(const std::string& scoresPath)
{
    std::ifstream in(scoresPath);
    if (!in)
    {
        throw ConfigError("scores", "cannot open file: " + scoresPath);
    }
    std::vector<double> scores;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
        {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(first, last - first + 1);
        try
        {
            std::size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size() || v < 0.0 || !std::isfinite(v))
            {
                throw std::invalid_argument(tok);
            }
            scores.push_back(v);
        }
        catch (const std::exception&)
        {
            throw ConfigError("scores",
                              "line " + std::to_string(lineNo) + ": not a non-negative number: '" +
                                  tok + "'");
        }
    }
    RayleighParams fit;
    try
    {
        fit = FitSigma(scores);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("scores", e.what());
    }
    std::cout << "fitted sigma: " << fit.sigma << "\n";
    std::cout << "tail probabilities P(X >= theta):\n";
    for (double theta : {2.0, 4.0, 8.0})
    {
        std::cout << "  theta=" << theta << ": " << TailProbability(theta, fit) << "\n";
    }
    return 0;
}

} // namespace

int
CliMain(const std::vector<std::string>& args)
{
    CLI::App app{"Deterministic NR-V2X sidelink simulator with distraction-based "
                 "transmission priority"};
    app.set_version_flag("--version", std::string("v2xsim ") + V2XSIM_VERSION);
    app.require_subcommand(0, 1);

    RunOptions runOpt;
    runOpt.outDir = DefaultOutDir();

    auto* run = app.add_subcommand("run", "Run one scenario and write records/summary/CDF");
    run->add_option("--config", runOpt.configPath, "JSON config file (or a previous manifest)");
    double thetaVal{};
    double sigmaVal{};
    int vehiclesVal{};
    std::uint64_t seedVal{};
    double durationVal{};
    auto* oTheta = run->add_option("--theta", thetaVal, "distraction threshold");
    auto* oSigma = run->add_option("--sigma", sigmaVal, "Rayleigh scale");
    auto* oVehicles = run->add_option("--vehicles", vehiclesVal, "vehicle count");
    auto* oSeed = run->add_option("--seed", seedVal, "run seed");
    auto* oDuration = run->add_option("--duration", durationVal, "simulated seconds");
    run->add_flag("--static", runOpt.staticVehicles, "freeze vehicle positions");
    run->add_flag("--export-map", runOpt.exportMap, "also write map.json");
    run->add_flag("--mac-trace", runOpt.macTrace, "also write mac_trace.csv");
    run->add_option("--out", runOpt.outDir, "output directory");

    RunOptions sweepOpt;
    sweepOpt.outDir = DefaultOutDir();
    auto* sweep = app.add_subcommand("sweep", "Run a (theta x seed) sweep and write sweep.csv");
    sweep->add_option("--config", sweepOpt.configPath, "JSON config file");
    std::string thetasArg = "2,4,8";
    int seedCount = 10;
    sweep->add_option("--thetas", thetasArg, "comma-separated thresholds (default 2,4,8)");
    sweep->add_option("--seeds", seedCount, "number of seeds, used as 1..N (default 10)");
    double sweepSigma{};
    int sweepVehicles{};
    double sweepDuration{};
    auto* oSweepSigma = sweep->add_option("--sigma", sweepSigma, "Rayleigh scale");
    auto* oSweepVehicles = sweep->add_option("--vehicles", sweepVehicles, "vehicle count");
    auto* oSweepDuration = sweep->add_option("--duration", sweepDuration, "simulated seconds");
    sweep->add_flag("--static", sweepOpt.staticVehicles, "freeze vehicle positions");
    sweep->add_option("--out", sweepOpt.outDir, "output directory");

    auto* calibrate =
        app.add_subcommand("calibrate", "Fit sigma from a newline-delimited score file");
    std::string scoresPath;
    calibrate->add_option("--scores", scoresPath, "score file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (run->parsed())
        {
            if (*oTheta) runOpt.theta = thetaVal;
            if (*oSigma) runOpt.sigma = sigmaVal;
            if (*oVehicles) runOpt.vehicles = vehiclesVal;
            if (*oSeed) runOpt.seed = seedVal;
            if (*oDuration) runOpt.duration = durationVal;
            return CmdRun(runOpt);
        }
        if (sweep->parsed())
        {
            if (*oSweepSigma) sweepOpt.sigma = sweepSigma;
            if (*oSweepVehicles) sweepOpt.vehicles = sweepVehicles;
            if (*oSweepDuration) sweepOpt.duration = sweepDuration;
            return CmdSweep(sweepOpt, thetasArg, seedCount);
        }
        if (calibrate->parsed())
        {
            return CmdCalibrate(scoresPath);
        }
        std::cout << app.help();
        return 0;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int
CliMain(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
    {
        args.emplace_back(argv[i]);
    }
    return CliMain(args);
}

} // namespace v2xsim
