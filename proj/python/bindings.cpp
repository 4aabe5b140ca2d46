#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vcma/analysis.hpp"
#include "vcma/cli.hpp"
#include "vcma/config.hpp"
#include "vcma/crossbar.hpp"
#include "vcma/dynamics.hpp"
#include "vcma/montecarlo.hpp"

namespace py = pybind11;
using namespace vcma;

namespace {

Json load(const std::string& config_json) { return parse_config(config_json, "<config>"); }

Waveform to_waveform(const std::vector<std::pair<double, double>>& segments)
{
    std::vector<Segment> segs;
    for (const auto& [u, d] : segments) segs.push_back({u, d});
    return Waveform(segs);
}

py::dict estimate_dict(const SwitchEstimate& e)
{
    py::dict d;
    d["p"] = e.p;
    d["n_trials"] = e.n_trials;
    d["n_switched"] = e.n_switched;
    d["ci_low"] = e.ci_low;
    d["ci_high"] = e.ci_high;
    d["seed"] = e.seed;
    return d;
}

py::list curve_list(const Curve& curve)
{
    py::list out;
    for (const auto& pt : curve) {
        py::dict d = estimate_dict(pt.estimate);
        d["x"] = pt.x;
        out.append(d);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Macrospin VCMA/STT switching simulator";

    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);

    m.def("default_config_json", [] { return default_config().dump(); });
    m.def("resolve_config_json", [](const std::string& cfg) { return load(cfg).dump(); });

    m.def(
        "llg_rhs",
        [](std::array<double, 3> mv, std::array<double, 3> hv, std::array<double, 3> iv, const std::string& cfg) {
            const Device d{device_params(load(cfg))};
            const Vec3 r = llg_rhs({mv[0], mv[1], mv[2]}, {hv[0], hv[1], hv[2]}, {iv[0], iv[1], iv[2]}, d);
            return std::array<double, 3>{r.x, r.y, r.z};
        },
        py::arg("m"), py::arg("h_eff"), py::arg("spin_current"), py::arg("config"));

    m.def(
        "simulate",
        [](const std::vector<std::pair<double, double>>& segments, std::uint64_t seed, std::uint64_t trial,
           const std::string& cfg) {
            const Json c = load(cfg);
            const Device d{device_params(c)};
            const SolverConfig s = solver_config(c);
            const Waveform w = to_waveform(segments);
            Trajectory t;
            {
                py::gil_scoped_release release;
                t = simulate(w, d, s, seed, trial);
            }
            std::vector<double> time, volts;
            std::vector<std::array<double, 3>> mag;
            for (const auto& sm : t.samples) {
                time.push_back(sm.t);
                volts.push_back(sm.voltage);
                mag.push_back({sm.m.x, sm.m.y, sm.m.z});
            }
            py::dict out;
            out["t"] = time;
            out["m"] = mag;
            out["voltage"] = volts;
            out["switched"] = t.switched;
            return out;
        },
        py::arg("segments"), py::arg("seed"), py::arg("trial"), py::arg("config"));

    m.def(
        "switching_probability",
        [](const std::vector<std::pair<double, double>>& segments, std::uint64_t n, std::uint64_t seed,
           const std::string& cfg, int threads) {
            const Json c = load(cfg);
            const Device d{device_params(c)};
            const SolverConfig s = solver_config(c);
            const Waveform w = to_waveform(segments);
            SwitchEstimate e;
            {
                py::gil_scoped_release release;
                e = estimate_probability(w, d, s, n, seed, threads);
            }
            return estimate_dict(e);
        },
        py::arg("segments"), py::arg("n_trials"), py::arg("seed"), py::arg("config"), py::arg("threads") = 1);

    m.def(
        "sweep_width",
        [](double voltage, const std::vector<double>& widths, std::uint64_t n, std::uint64_t seed,
           const std::string& cfg, int threads) {
            const Json c = load(cfg);
            const Device d{device_params(c)};
            Curve curve;
            {
                py::gil_scoped_release release;
                curve = sweep_width(voltage, widths, d, solver_config(c), n, seed, threads);
            }
            return curve_list(curve);
        },
        py::arg("voltage"), py::arg("widths"), py::arg("n_trials"), py::arg("seed"), py::arg("config"),
        py::arg("threads") = 1);

    m.def(
        "sweep_amplitude",
        [](double width, const std::vector<double>& amplitudes, std::uint64_t n, std::uint64_t seed,
           const std::string& cfg, int threads) {
            const Json c = load(cfg);
            const Device d{device_params(c)};
            Curve curve;
            {
                py::gil_scoped_release release;
                curve = sweep_amplitude(width, amplitudes, d, solver_config(c), n, seed, threads);
            }
            return curve_list(curve);
        },
        py::arg("width"), py::arg("amplitudes"), py::arg("n_trials"), py::arg("seed"), py::arg("config"),
        py::arg("threads") = 1);

    m.def(
        "ordering_in_cap",
        [](double voltage, double cap_angle, int grid_n, const std::string& cfg) {
            const Device d{device_params(load(cfg))};
            const auto v = ordering_in_cap(voltage, d, cap_angle, grid_n);
            return py::make_tuple(to_string(v.majority), v.agreement);
        },
        py::arg("voltage"), py::arg("cap_angle"), py::arg("grid_n"), py::arg("config"));

    m.def(
        "exit_histogram",
        [](double voltage, std::uint64_t n, std::uint64_t seed, const std::string& cfg, int threads) {
            const Json c = load(cfg);
            const Device d{device_params(c)};
            const Json& e = c["experiment"]["exit_hist"];
            ExitOptions opt;
            opt.exit_angle = e["exit_angle"].get<double>();
            opt.window = e["window"].get<double>();
            opt.bins = static_cast<int>(e["bins"].get<std::uint64_t>());
            ExitHistogram h;
            {
                py::gil_scoped_release release;
                h = exit_histogram(voltage, d, solver_config(c), n, seed, opt, threads);
            }
            py::dict out;
            out["counts"] = h.counts;
            out["exited"] = h.exited;
            out["never_exited"] = h.never_exited;
            out["concentration"] = h.concentration;
            return out;
        },
        py::arg("voltage"), py::arg("n_trials"), py::arg("seed"), py::arg("config"), py::arg("threads") = 1);

    m.def(
        "sneak_solve",
        [](const std::vector<std::vector<double>>& g, std::size_t row, std::size_t col, double voltage) {
            ConductanceGrid grid{g.size(), g.empty() ? 0 : g[0].size(), {}};
            for (const auto& r : g) {
                if (r.size() != grid.cols) throw InvalidParameter("sneak_solve: ragged conductance grid");
                grid.g.insert(grid.g.end(), r.begin(), r.end());
            }
            const auto s = sneak_solve(grid, row, col, voltage);
            py::dict out;
            out["row_voltages"] = s.row_voltages;
            out["col_voltages"] = s.col_voltages;
            out["currents"] = s.currents;
            out["source_current"] = s.source_current;
            out["residual"] = s.residual;
            return out;
        },
        py::arg("conductances"), py::arg("driven_row"), py::arg("driven_col"), py::arg("voltage"));

    m.def(
        "write_disturb",
        [](std::size_t rows, std::size_t cols, double p_sel, double p_half) {
            const auto d = write_disturb(CrossbarSpec::uniform(rows, cols, CellState::P), p_sel, p_half);
            py::dict out;
            out["half_select_events"] = d.half_select_events;
            out["per_cell"] = d.per_cell;
            out["expected_disturbed"] = d.expected_disturbed;
            out["expected_failed"] = d.expected_failed;
            return out;
        },
        py::arg("rows"), py::arg("cols"), py::arg("p_sel"), py::arg("p_half"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
