#include "vcma/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "vcma/analysis.hpp"
#include "vcma/config.hpp"
#include "vcma/crossbar.hpp"
#include "vcma/io.hpp"
#include "vcma/montecarlo.hpp"
#include "vcma/validate.hpp"

namespace vcma {

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;

struct Context {
    Json config;
    int threads = 1;
    std::ostream* out = nullptr;
};

struct Outcome {
    Files files;
    int code = exit_ok;
};

std::vector<double> doubles(const Json& list)
{
    std::vector<double> v;
    for (const auto& x : list) v.push_back(x.get<double>());
    return v;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path + ": cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) { return format_double(v); }

Outcome cmd_sweep_width(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["sweep_width"];
    const Device device(device_params(ctx.config));
    const auto widths = doubles(e["widths"]);
    const Curve curve = sweep_width(e["voltage"].get<double>(), widths, device, solver_config(ctx.config),
                                    config_trials(ctx.config), config_seed(ctx.config), ctx.threads);
    for (const auto& pt : curve) {
        *ctx.out << "width " << fmt(pt.x) << " s  P = " << fmt(pt.estimate.p) << '\n';
    }
    return {{{"sweep_width.csv", curve_csv(curve, config_header(ctx.config))}}};
}

Outcome cmd_sweep_amplitude(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["sweep_amplitude"];
    const Device device(device_params(ctx.config));
    const auto amps = doubles(e["amplitudes"]);
    const Curve curve = sweep_amplitude(e["width"].get<double>(), amps, device, solver_config(ctx.config),
                                        config_trials(ctx.config), config_seed(ctx.config), ctx.threads);
    for (const auto& pt : curve) {
        *ctx.out << "amplitude " << fmt(pt.x) << " V  P = " << fmt(pt.estimate.p) << '\n';
    }
    return {{{"sweep_amplitude.csv", curve_csv(curve, config_header(ctx.config))}}};
}

CombinedPulseSpec pulse_spec(const Json& e)
{
    return {e["vcma_voltage"].get<double>(), e["vcma_width"].get<double>(), e["stt_voltage"].get<double>()};
}

Outcome paired_output(const Context& ctx, const std::vector<PairedPoint>& points, const std::string& first_name,
                      const std::string& second_name, const char* first_label, const char* second_label)
{
    Curve a, b;
    for (const auto& p : points) {
        a.push_back({p.follow_width, p.first});
        b.push_back({p.follow_width, p.second});
        *ctx.out << "follow " << fmt(p.follow_width) << " s  " << first_label << " P = " << fmt(p.first.p) << "  "
                 << second_label << " P = " << fmt(p.second.p) << '\n';
    }
    const std::string header = config_header(ctx.config);
    return {{{first_name, curve_csv(a, header + "# curve: " + first_label + "\n")},
             {second_name, curve_csv(b, header + "# curve: " + second_label + "\n")}}};
}

Outcome cmd_combined(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["combined"];
    const Device device(device_params(ctx.config));
    const auto follow = doubles(e["follow_widths"]);
    const auto points = compare_pure_stt(follow, device, solver_config(ctx.config), config_trials(ctx.config),
                                         config_seed(ctx.config), pulse_spec(e), ctx.threads);
    return paired_output(ctx, points, "combined.csv", "pure_stt.csv", "combined", "pure_stt");
}

Outcome cmd_half_select(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["half_select"];
    const Device device(device_params(ctx.config));
    const auto follow = doubles(e["follow_widths"]);
    const auto points = half_select_contrast(follow, device, solver_config(ctx.config), config_trials(ctx.config),
                                             config_seed(ctx.config), pulse_spec(e), ctx.threads);
    return paired_output(ctx, points, "half_select_full.csv", "half_select_half.csv", "full_select",
                         "half_select");
}

Outcome cmd_field_map(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["field_map"];
    const Device device(device_params(ctx.config));
    const double u = e["voltage"].get<double>();
    MapOptions opt;
    opt.cap_angle = e["cap_angle"].get<double>();
    opt.include_stt = e["include_stt"].get<bool>();
    opt.separate_precession = e["separate_precession"].get<bool>();
    const auto samples = velocity_field_map(u, device, static_cast<int>(e["grid_n"].get<std::uint64_t>()), opt);
    const auto verdict = ordering_in_cap(u, device, e["ordering_cap_angle"].get<double>(),
                                         static_cast<int>(e["ordering_grid_n"].get<std::uint64_t>()),
                                         e["ordering_tilt"].get<double>());
    const std::string ordering = "# ordering: " + to_string(verdict.majority) +
                                 " agreement " + fmt(verdict.agreement) + " tilt " + fmt(verdict.tilt) + "\n";
    *ctx.out << "ordering at " << fmt(u) << " V: " << to_string(verdict.majority) << " (agreement "
             << fmt(verdict.agreement) << ")\n";
    const std::string header = config_header(ctx.config) + ordering;
    Outcome o{{{"field_map.csv", field_map_csv(samples, header)}}};
    if (opt.separate_precession) {
        std::string csv = header + "theta,phi,pxx,pxy,pxz,pyx,pyy,pyz,pzx,pzy,pzz\n";
        for (const auto& s : samples) {
            std::string line = fmt(s.theta) + ',' + fmt(s.phi);
            for (const Vec3& p : {s.precession_x, s.precession_y, s.precession_z}) {
                line += ',' + fmt(p.x) + ',' + fmt(p.y) + ',' + fmt(p.z);
            }
            csv += line + '\n';
        }
        o.files.emplace_back("field_map_precession.csv", csv);
    }
    return o;
}

Outcome cmd_exit_hist(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["exit_hist"];
    const Device device(device_params(ctx.config));
    const SolverConfig solver = solver_config(ctx.config);
    const double u = e["voltage"].get<double>();
    ExitOptions opt;
    opt.exit_angle = e["exit_angle"].get<double>();
    opt.window = e["window"].get<double>();
    opt.bins = static_cast<int>(e["bins"].get<std::uint64_t>());
    const std::uint64_t seed = config_seed(ctx.config);
    const auto hist = exit_histogram(u, device, solver, config_trials(ctx.config), seed, opt, ctx.threads);
    *ctx.out << "C2 at " << fmt(u) << " V = " << fmt(hist.concentration) << " (" << hist.exited << " exited, "
             << hist.never_exited << " never exited)\n";
    const std::string header = config_header(ctx.config);
    Outcome o{{{"exit_hist.csv", histogram_csv(hist, header)}}};
    // Sample paths replay the first histogram trials exactly.
    const std::uint64_t n_traj = std::min(e["trajectories"].get<std::uint64_t>(), config_trials(ctx.config));
    for (std::uint64_t i = 0; i < n_traj; ++i) {
        const auto traj = simulate(vcma_pulse(u, opt.window), device, solver, seed, i);
        char name[64];
        std::snprintf(name, sizeof name, "exit_trajectory_%02llu.csv", static_cast<unsigned long long>(i));
        o.files.emplace_back(name, trajectory_csv(traj, header + "# trial: " + std::to_string(i) + "\n"));
    }
    return o;
}

CrossbarSpec load_array(const Json& block, const DeviceParams& params)
{
    if (!block["state_file"].is_null()) {
        CrossbarSpec spec;
        spec.states = read_state_grid(read_text(block["state_file"].get<std::string>()), spec.rows, spec.cols);
        spec.params = params;
        spec.validate();
        return spec;
    }
    const auto state = block["initial_state"].get<std::string>() == "P" ? CellState::P : CellState::AP;
    return CrossbarSpec::uniform(block["rows"].get<std::uint64_t>(), block["cols"].get<std::uint64_t>(), state,
                                 params);
}

Json counts_json(const ClassCounts& c)
{
    return Json{{"selected", c.selected}, {"half_selected", c.half_selected}, {"unselected", c.unselected}};
}

Outcome cmd_xbar_write(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["xbar_write"];
    const DeviceParams params = device_params(ctx.config);
    const CrossbarSpec spec = load_array(e, params);
    std::vector<Segment> segs;
    for (const auto& s : e["waveform"]) segs.push_back({s[0].get<double>(), s[1].get<double>()});
    WriteRequest req{e["target"][0].get<std::uint64_t>(), e["target"][1].get<std::uint64_t>(), Waveform(segs),
                     parse_write_scheme(e["scheme"].get<std::string>())};
    const Classification cls = classify(spec, req.row, req.col);

    const std::uint64_t seed = config_seed(ctx.config);
    const std::uint64_t n = config_trials(ctx.config);
    const Device device(params);
    const SolverConfig solver = solver_config(ctx.config);
    Json p_json = Json::object();
    auto probability = [&](const char* key, const Waveform& w, std::uint64_t index) {
        if (!e[key].is_null()) {
            p_json[key] = Json{{"value", e[key].get<double>()}, {"source", "config"}};
            return e[key].get<double>();
        }
        const auto est = estimate_probability(w, device, solver, n, point_seed(seed, index), ctx.threads);
        p_json[key] = Json{{"value", est.p},
                           {"source", "monte_carlo"},
                           {"n", est.n_trials},
                           {"ci_low", est.ci_low},
                           {"ci_high", est.ci_high},
                           {"seed", est.seed}};
        return est.p;
    };
    const double p_sel = probability("p_sel", req.waveform, 0);
    const double p_half = probability("p_half", req.waveform.scaled(0.5), 1);
    const DisturbStats d = write_disturb(spec, p_sel, p_half);
    const EnergyBreakdown en = write_energy(spec, req);

    // Peak cell currents at the largest |U| of the waveform.
    double u_peak = 0.0;
    for (const auto& s : req.waveform.segments()) u_peak = std::max(u_peak, std::abs(s.voltage));
    double i_sel = 0.0, i_half_sum = 0.0, i_half_max = 0.0, i_un_sum = 0.0;
    if (req.scheme == WriteScheme::half_voltage) {
        for (std::size_t i = 0; i < spec.rows; ++i) {
            for (std::size_t j = 0; j < spec.cols; ++j) {
                const auto k = cls.membership[i * spec.cols + j];
                if (k == CellClass::selected) {
                    i_sel = u_peak / spec.resistance(i, j);
                } else if (k == CellClass::half_selected) {
                    const double I = 0.5 * u_peak / spec.resistance(i, j);
                    i_half_sum += I;
                    i_half_max = std::max(i_half_max, I);
                }
            }
        }
    } else {
        const auto sol = sneak_solve(spec, req.row, req.col, u_peak);
        for (std::size_t k = 0; k < sol.currents.size(); ++k) {
            const double I = std::abs(sol.currents[k]);
            if (cls.membership[k] == CellClass::selected) {
                i_sel = I;
            } else if (cls.membership[k] == CellClass::half_selected) {
                i_half_sum += I;
                i_half_max = std::max(i_half_max, I);
            } else {
                i_un_sum += I;
            }
        }
    }

    Json report;
    report["config"] = ctx.config;
    report["seed"] = seed;
    report["counts"] = counts_json(cls.counts);
    report["disturb"] = Json{{"p_sel", p_json["p_sel"]},
                             {"p_half", p_json["p_half"]},
                             {"half_select_events_per_cell", d.half_select_events},
                             {"per_cell", d.per_cell},
                             {"expected_disturbed", d.expected_disturbed},
                             {"expected_failed", d.expected_failed}};
    report["energy"] = Json{{"unit", "J"},
                            {"scheme", to_string(req.scheme)},
                            {"selected", en.selected},
                            {"half_selected", en.half_selected},
                            {"unselected", en.unselected},
                            {"total", en.total}};
    report["currents"] = Json{{"unit", "A"},
                              {"peak_voltage", u_peak},
                              {"selected", i_sel},
                              {"half_selected_total", i_half_sum},
                              {"half_selected_max", i_half_max},
                              {"unselected_total", i_un_sum}};
    *ctx.out << "per-cell disturb probability " << fmt(d.per_cell) << ", expected disturbed cells "
             << fmt(d.expected_disturbed) << ", write energy " << fmt(en.total) << " J\n";
    return {{{"xbar_write.json", report.dump(2) + "\n"},
             {"xbar_state.csv", config_header(ctx.config) + write_state_grid(spec)}}};
}

Outcome cmd_sneak(const Context& ctx)
{
    const Json& e = ctx.config["experiment"]["sneak"];
    const CrossbarSpec spec = load_array(e, device_params(ctx.config));
    const std::size_t r = e["driven_row"].get<std::uint64_t>();
    const std::size_t c = e["driven_col"].get<std::uint64_t>();
    const Classification cls = classify(spec, r, c);
    const auto sol = sneak_solve(spec, r, c, e["voltage"].get<double>());
    Json grid = Json::array();
    for (std::size_t i = 0; i < spec.rows; ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < spec.cols; ++j) row.push_back(sol.currents[i * spec.cols + j]);
        grid.push_back(row);
    }
    const double selected = sol.currents[r * spec.cols + c];
    Json report;
    report["config"] = ctx.config;
    report["seed"] = config_seed(ctx.config);
    report["counts"] = counts_json(cls.counts);
    report["disturb"] = nullptr;
    report["energy"] = nullptr;
    report["currents"] = Json{{"unit", "A"},
                              {"selected", selected},
                              {"sneak_total", sol.source_current - selected},
                              {"source", sol.source_current},
                              {"kcl_residual", sol.residual},
                              {"row_voltages", sol.row_voltages},
                              {"col_voltages", sol.col_voltages},
                              {"cells", grid}};
    *ctx.out << "selected current " << fmt(selected) << " A, sneak current " << fmt(sol.source_current - selected)
             << " A\n";
    return {{{"sneak.json", report.dump(2) + "\n"},
             {"sneak_state.csv", config_header(ctx.config) + write_state_grid(spec)}}};
}

Outcome cmd_validate(const Context& ctx)
{
    const auto results = run_property_suite(device_params(ctx.config), solver_config(ctx.config),
                                            config_seed(ctx.config), ctx.threads);
    Json checks = Json::array();
    bool all = true;
    for (const auto& r : results) {
        *ctx.out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        checks.push_back(Json{{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        all = all && r.passed;
    }
    Json report{{"config", ctx.config}, {"seed", config_seed(ctx.config)}, {"passed", all}, {"checks", checks}};
    return {{{"validate.json", report.dump(2) + "\n"}}, all ? exit_ok : exit_validation};
}

void write_outputs(const std::string& dir, const Files& files)
{
    std::filesystem::create_directories(dir);
    std::vector<std::string> staged;
    try {
        for (const auto& [name, content] : files) {
            const std::string tmp = (std::filesystem::path(dir) / (name + ".tmp")).string();
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            staged.push_back(tmp);
            out << content;
            out.flush();
            if (!out) throw std::runtime_error("cannot write " + tmp);
        }
    } catch (...) {
        for (const auto& t : staged) std::filesystem::remove(t);
        throw;
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::filesystem::rename(staged[i], std::filesystem::path(dir) / files[i].first);
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Macrospin VCMA-MTJ switching and crossbar write simulator", "vcma-sim"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::string out_dir = "out";
    int threads = 1;
    std::vector<std::string> overrides;

    const std::map<std::string, std::pair<std::string, std::function<Outcome(const Context&)>>> commands{
        {"sweep-width", {"switching probability vs. pulse width", cmd_sweep_width}},
        {"sweep-amplitude", {"switching probability vs. pulse amplitude", cmd_sweep_amplitude}},
        {"combined", {"VCMA-STT combined pulse vs. pure STT", cmd_combined}},
        {"half-select", {"full- vs. half-selected combined pulse", cmd_half_select}},
        {"field-map", {"deterministic velocity field and field ordering", cmd_field_map}},
        {"exit-hist", {"exit azimuth histogram around the south pole", cmd_exit_hist}},
        {"xbar-write", {"V/2 scheme disturb and energy analysis", cmd_xbar_write}},
        {"sneak", {"floating-line sneak current nodal solve", cmd_sneak}},
        {"validate", {"run the property suite", cmd_validate}},
    };
    std::map<std::string, CLI::Option*> seed_opts, trial_opts;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", config_path, "JSON config, or an emitted output file to replay");
        seed_opts[name] = sub->add_option("--seed", seed, "root seed");
        trial_opts[name] = sub->add_option("--trials", trials, "Monte Carlo trials per point")
                               ->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--set", overrides, "override a config value: dotted.key=value");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        Context ctx;
        ctx.config = config_path.empty() ? default_config() : load_config(config_path);
        for (const auto& o : overrides) apply_override(ctx.config, o);
        if (seed_opts[name]->count() > 0) ctx.config["seed"] = seed;
        if (trial_opts[name]->count() > 0) ctx.config["n_trials"] = trials;
        validate_config(ctx.config);
        ctx.threads = threads;
        ctx.out = &out;
        const Outcome outcome = commands.at(name).second(ctx);
        write_outputs(out_dir, outcome.files);
        for (const auto& f : outcome.files) {
            out << "wrote " << (std::filesystem::path(out_dir) / f.first).string() << '\n';
        }
        return outcome.code;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return exit_solver;
    } catch (const std::exception& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    }
}

} // namespace vcma
