#include "v2xsim/channel.hpp"
#include "v2xsim/distraction.hpp"
#include "v2xsim/mac.hpp"
#include "v2xsim/roadnet.hpp"
#include "v2xsim/simcore.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

namespace py = pybind11;

namespace {

v2xsim::ScenarioConfig
ConfigFromDict(const py::dict& overrides)
{
    v2xsim::ScenarioConfig cfg;
    if (!overrides.empty())
    {
        py::object dumps = py::module_::import("json").attr("dumps");
        const std::string text = dumps(overrides).cast<std::string>();
        v2xsim::ApplyConfigJson(cfg, nlohmann::json::parse(text));
    }
    cfg.Validate();
    return cfg;
}

py::dict
SummaryToDict(const v2xsim::Summary& s)
{
    py::object loads = py::module_::import("json").attr("loads");
    return loads(v2xsim::SummaryToJson(s).dump()).cast<py::dict>();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "NR-V2X sidelink simulator with distraction-based transmission priority";

    py::enum_<v2xsim::Priority>(m, "Priority")
        .value("Normal", v2xsim::Priority::Normal)
        .value("High", v2xsim::Priority::High);

    m.def(
        "rayleigh_pdf",
        [](double x, double sigma) { return v2xsim::RayleighPdf(x, {sigma}); },
        py::arg("x"), py::arg("sigma") = 2.0);
    m.def(
        "tail_probability",
        [](double theta, double sigma) { return v2xsim::TailProbability(theta, {sigma}); },
        py::arg("theta"), py::arg("sigma") = 2.0);
    m.def(
        "sample_distraction",
        [](double u, double sigma) { return v2xsim::SampleDistraction(u, {sigma}); },
        py::arg("u"), py::arg("sigma") = 2.0,
        "Inverse-CDF transform of a single uniform in [0, 1)");
    m.def("classify", &v2xsim::Classify, py::arg("level"), py::arg("theta"));
    m.def(
        "fit_sigma",
        [](const std::vector<double>& levels) {
            return v2xsim::FitSigma(levels).sigma;
        },
        py::arg("levels"));

    m.def("los_probability", &v2xsim::LosProbability, py::arg("d2d_m"));
    m.def(
        "pathloss_db",
        [](double d3d, bool los, double freqGhz) {
            v2xsim::ChannelConfig cfg;
            cfg.carrierFreqGhz = freqGhz;
            return v2xsim::PathlossDb(d3d, los, cfg);
        },
        py::arg("d3d_m"), py::arg("los") = true, py::arg("carrier_freq_ghz") = 3.5);
    m.def(
        "sinr_db",
        [](double signalDbm, const std::vector<double>& interferersDbm, double bandwidthHz,
           double noiseFigureDb) {
            v2xsim::ChannelConfig cfg;
            cfg.bandwidthPerSubchannelHz = bandwidthHz;
            cfg.noiseFigureDb = noiseFigureDb;
            return v2xsim::SinrDb(signalDbm, interferersDbm, cfg);
        },
        py::arg("signal_dbm"), py::arg("interferers_dbm") = std::vector<double>{},
        py::arg("bandwidth_hz") = 2.5e6, py::arg("noise_figure_db") = 9.0);

    m.def(
        "run_scenario",
        [](const py::dict& config, bool withRecords) {
            const v2xsim::ScenarioConfig cfg = ConfigFromDict(config);
            v2xsim::ScenarioResult result;
            {
                py::gil_scoped_release release;
                result = v2xsim::RunScenario(cfg);
            }
            py::dict out;
            out["summary"] = SummaryToDict(result.summary);
            if (withRecords)
            {
                py::list records;
                for (const auto& r : result.records)
                {
                    const py::object latency =
                        std::isnan(r.latencyMs) ? py::object(py::none())
                                                : py::object(py::float_(r.latencyMs));
                    records.append(py::make_tuple(r.msgId, r.txId, r.rxId, r.genTimeMs, latency,
                                                  v2xsim::ToString(r.priority),
                                                  v2xsim::ToString(r.outcome)));
                }
                out["records"] = records;
            }
            return out;
        },
        py::arg("config") = py::dict(), py::arg("with_records") = false,
        "Runs one scenario; config keys mirror the JSON config schema");

    m.def(
        "records_csv",
        [](const py::dict& config) {
            const v2xsim::ScenarioConfig cfg = ConfigFromDict(config);
            v2xsim::ScenarioResult result;
            {
                py::gil_scoped_release release;
                result = v2xsim::RunScenario(cfg);
            }
            std::ostringstream os;
            v2xsim::WriteRecordsCsv(os, result.records);
            return os.str();
        },
        py::arg("config") = py::dict(),
        "Runs one scenario and returns the records CSV as a string");

    m.attr("__version__") = "0.1.0";
}
