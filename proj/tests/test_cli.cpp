#include "v2xsim/cli_app.hpp"

#include "doctest.h"
#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>

using v2xsim::CliMain;
namespace fs = std::filesystem;

namespace {

class TempDir
{
  public:
    TempDir()
    {
        static int counter = 0;
        m_path = fs::temp_directory_path() /
                 ("v2xsim_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(m_path);
    }

    ~TempDir() { fs::remove_all(m_path); }

    const fs::path& Path() const { return m_path; }
    std::string Sub(const std::string& name) const { return (m_path / name).string(); }

  private:
    fs::path m_path;
};

void
WriteFile(const fs::path& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    os << content;
}

std::string
ReadFile(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string
TinyConfigJson()
{
    return R"({
      "vehicle_count": 6,
      "sim_duration_s": 1.0,
      "warmup_s": 0.2,
      "map_bounds_m": 400.0,
      "junction_count": 1
    })";
}

} // namespace

TEST_CASE("help and version exit cleanly")
{
    CHECK(CliMain({"--help"}) == 0);
    CHECK(CliMain({"--version"}) == 0);
    CHECK(CliMain({"run", "--help"}) == 0);
    CHECK(CliMain({}) == 0); // bare invocation prints help
}

TEST_CASE("argument and config validation exit with code 2")
{
    TempDir tmp;
    CHECK(CliMain({"--no-such-flag"}) == 2);
    CHECK(CliMain({"frobnicate"}) == 2);
    CHECK(CliMain({"calibrate"}) == 2); // --scores is required

    // missing config file
    CHECK(CliMain({"run", "--config", tmp.Sub("absent.json"), "--out", tmp.Sub("o")}) == 2);

    // malformed JSON
    WriteFile(tmp.Path() / "bad.json", "{nope");
    CHECK(CliMain({"run", "--config", tmp.Sub("bad.json"), "--out", tmp.Sub("o")}) == 2);

    // unknown config key is rejected, not ignored
    WriteFile(tmp.Path() / "unknown.json", R"({"vehicle_cnt": 6})");
    CHECK(CliMain({"run", "--config", tmp.Sub("unknown.json"), "--out", tmp.Sub("o")}) == 2);

    // semantically invalid value
    WriteFile(tmp.Path() / "cfg.json", TinyConfigJson());
    CHECK(CliMain({"run", "--config", tmp.Sub("cfg.json"), "--sigma", "-1", "--out",
                   tmp.Sub("o")}) == 2);
}

TEST_CASE("run writes the expected artifacts")
{
    TempDir tmp;
    WriteFile(tmp.Path() / "cfg.json", TinyConfigJson());
    const std::string out = tmp.Sub("out");
    CHECK(CliMain({"run", "--config", tmp.Sub("cfg.json"), "--seed", "3", "--export-map",
                   "--mac-trace", "--out", out}) == 0);

    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    CHECK(fs::exists(fs::path(out) / "records.csv"));
    CHECK(fs::exists(fs::path(out) / "summary.json"));
    CHECK(fs::exists(fs::path(out) / "cdf.csv"));
    CHECK(fs::exists(fs::path(out) / "map.json"));
    CHECK(fs::exists(fs::path(out) / "mac_trace.csv"));

    const std::string records = ReadFile(fs::path(out) / "records.csv");
    CHECK(records.rfind("msg_id,tx_id,rx_id,gen_time_ms,rx_time_ms,latency_ms,priority,outcome\n",
                        0) == 0);
    const std::string cdf = ReadFile(fs::path(out) / "cdf.csv");
    CHECK(cdf.rfind("bin_left_ms,bin_right_ms,count,cdf\n", 0) == 0);

    const auto manifest = nlohmann::json::parse(ReadFile(fs::path(out) / "manifest.json"));
    CHECK(manifest["tool_version"] == V2XSIM_VERSION);
    CHECK(manifest["config"]["seed"] == 3);
    CHECK(manifest["config"]["vehicle_count"] == 6);
    CHECK(manifest["seeds"].size() == 1);

    const auto summary = nlohmann::json::parse(ReadFile(fs::path(out) / "summary.json"));
    CHECK(summary.contains("all"));
    CHECK(summary.contains("high"));
    CHECK(summary.contains("frac_high_under_20ms"));
}

TEST_CASE("flags override the config file")
{
    TempDir tmp;
    WriteFile(tmp.Path() / "cfg.json", TinyConfigJson());
    const std::string out = tmp.Sub("out");
    CHECK(CliMain({"run", "--config", tmp.Sub("cfg.json"), "--theta", "8", "--vehicles", "7",
                   "--static", "--out", out}) == 0);
    const auto manifest = nlohmann::json::parse(ReadFile(fs::path(out) / "manifest.json"));
    CHECK(manifest["config"]["theta"] == 8.0);
    CHECK(manifest["config"]["vehicle_count"] == 7);
    CHECK(manifest["config"]["static_vehicles"] == true);
    CHECK(manifest["config"]["warmup_s"] == 0.2); // file value survives where no flag given
}

TEST_CASE("reruns are byte-identical and a manifest reproduces its run")
{
    TempDir tmp;
    WriteFile(tmp.Path() / "cfg.json", TinyConfigJson());
    const std::string a = tmp.Sub("a");
    const std::string b = tmp.Sub("b");
    CHECK(CliMain({"run", "--config", tmp.Sub("cfg.json"), "--seed", "9", "--out", a}) == 0);
    CHECK(CliMain({"run", "--config", tmp.Sub("cfg.json"), "--seed", "9", "--out", b}) == 0);
    CHECK(ReadFile(fs::path(a) / "records.csv") == ReadFile(fs::path(b) / "records.csv"));
    CHECK(ReadFile(fs::path(a) / "summary.json") == ReadFile(fs::path(b) / "summary.json"));
    CHECK(ReadFile(fs::path(a) / "cdf.csv") == ReadFile(fs::path(b) / "cdf.csv"));

    // the manifest alone reproduces the run bit for bit
    const std::string c = tmp.Sub("c");
    CHECK(CliMain({"run", "--config", (fs::path(a) / "manifest.json").string(), "--out", c}) == 0);
    CHECK(ReadFile(fs::path(a) / "records.csv") == ReadFile(fs::path(c) / "records.csv"));
}

TEST_CASE("output directory falls back to the environment variable")
{
    TempDir tmp;
    WriteFile(tmp.Path() / "cfg.json", TinyConfigJson());
    const std::string envOut = tmp.Sub("env_out");
    ::setenv("V2XSIM_OUT", envOut.c_str(), 1);
    const int rc = CliMain({"run", "--config", tmp.Sub("cfg.json")});
    ::unsetenv("V2XSIM_OUT");
    CHECK(rc == 0);
    CHECK(fs::exists(fs::path(envOut) / "records.csv"));
}

TEST_CASE("sweep writes sweep.csv and per-run summaries")
{
    TempDir tmp;
    WriteFile(tmp.Path() / "cfg.json", TinyConfigJson());
    const std::string out = tmp.Sub("sweep");
    CHECK(CliMain({"sweep", "--config", tmp.Sub("cfg.json"), "--thetas", "0,9", "--seeds", "2",
                   "--out", out}) == 0);

    const std::string csv = ReadFile(fs::path(out) / "sweep.csv");
    CHECK(csv.rfind("theta,seed,p50_high_ms,p90_high_ms,frac_high_under_20ms,delivery_ratio\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5); // header + 2 thetas x 2 seeds
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    CHECK(fs::exists(fs::path(out) / "summary_theta0_seed1.json"));
    CHECK(fs::exists(fs::path(out) / "summary_theta9_seed2.json"));

    CHECK(CliMain({"sweep", "--thetas", "abc", "--out", tmp.Sub("x")}) == 2);
    CHECK(CliMain({"sweep", "--thetas", "2", "--seeds", "0", "--out", tmp.Sub("x")}) == 2);
}

TEST_CASE("calibrate fits sigma from a score file")
{
    TempDir tmp;
    WriteFile(tmp.Path() / "scores.txt", "2.0\n2.0\n\n  2.0 \n2.0\n");
    CHECK(CliMain({"calibrate", "--scores", tmp.Sub("scores.txt")}) == 0);

    WriteFile(tmp.Path() / "empty.txt", "\n\n");
    CHECK(CliMain({"calibrate", "--scores", tmp.Sub("empty.txt")}) == 2);

    WriteFile(tmp.Path() / "junk.txt", "1.5\nbanana\n");
    CHECK(CliMain({"calibrate", "--scores", tmp.Sub("junk.txt")}) == 2);

    WriteFile(tmp.Path() / "neg.txt", "1.5\n-2\n");
    CHECK(CliMain({"calibrate", "--scores", tmp.Sub("neg.txt")}) == 2);

    CHECK(CliMain({"calibrate", "--scores", tmp.Sub("absent.txt")}) == 2);
}
