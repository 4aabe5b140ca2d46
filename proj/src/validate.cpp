#include "vcma/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vcma/analysis.hpp"
#include "vcma/crossbar.hpp"
#include "vcma/errors.hpp"
#include "vcma/io.hpp"
#include "vcma/montecarlo.hpp"
#include "vcma/rng.hpp"

namespace vcma {

namespace {

CheckResult check(std::string name, bool passed, const std::string& detail)
{
    return {std::move(name), passed, detail};
}

std::string sci(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

Vec3 random_unit(NormalStream& rng)
{
    return normalized(rng.next_vec3());
}

} // namespace

double conservative_energy_drift(const DeviceParams& params, const Vec3& m0, double voltage, double dt,
                                 std::int64_t steps)
{
    DeviceParams p = params;
    p.damping = 0.0;
    p.temperature = 0.0;
    const Device device(p, Device::Conservative{});
    const HeunIntegrator integ(device, dt);
    const double e0 = device.static_energy(m0, voltage);
    Vec3 m = m0;
    double worst = 0.0;
    for (std::int64_t k = 0; k < steps; ++k) {
        m = integ.step_with_field(m, voltage, Vec3{});
        worst = std::max(worst, std::abs(device.static_energy(m, voltage) - e0));
    }
    return worst / std::abs(e0);
}

std::vector<double> dense_nodal_voltages(std::size_t rows, std::size_t cols, const std::vector<double>& g,
                                         std::size_t driven_row, std::size_t driven_col, double voltage)
{
    const std::size_t n = rows + cols;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double gij = g[i * cols + j];
            const std::size_t c = rows + j;
            a[i][i] += gij;
            a[c][c] += gij;
            a[i][c] -= gij;
            a[c][i] -= gij;
        }
    }
    for (std::size_t d : {driven_row, rows + driven_col}) {
        std::fill(a[d].begin(), a[d].end(), 0.0);
        a[d][d] = 1.0;
        a[d][n] = d == driven_row ? voltage : 0.0;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a[r][k]) > std::abs(a[piv][k])) piv = r;
        }
        if (a[piv][k] == 0.0) {
            throw SolverError("dense_nodal_voltages: singular system");
        }
        std::swap(a[k], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k || a[r][k] == 0.0) continue;
            const double f = a[r][k] / a[k][k];
            for (std::size_t c = k; c <= n; ++c) {
                a[r][c] -= f * a[k][c];
            }
        }
    }
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = a[k][n] / a[k][k];
    }
    return v;
}

std::vector<CheckResult> run_property_suite(const DeviceParams& params, const SolverConfig& config,
                                            std::uint64_t seed, int threads)
{
    params.validate();
    config.validate();
    const Device device(params);
    std::vector<CheckResult> out;
    NormalStream rng(derive_seed(seed, 0xA11));

    {
        const HeunIntegrator integ(device, config.dt);
        double worst = 0.0;
        for (int chain = 0; chain < 10; ++chain) {
            Vec3 m = random_unit(rng);
            const double u = 1.2 * rng.uniform();
            for (int k = 0; k < 10000; ++k) {
                m = integ.step(m, u, rng);
                worst = std::max(worst, std::abs(1.0 - norm(m)));
            }
        }
        out.push_back(check("heun_norm", worst < 1e-9, "max |1-|m|| = " + sci(worst) + " over 1e5 steps"));
    }
    {
        double worst = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const Vec3 m = random_unit(rng);
            const Vec3 h = rng.next_vec3() * 1e6;
            const Vec3 is = rng.next_vec3() * 1e-4;
            const Vec3 v = llg_rhs(m, h, is, device);
            const double scale = norm(v);
            if (scale > 0.0) worst = std::max(worst, std::abs(dot(v, m)) / scale);
        }
        out.push_back(check("llg_rhs_orthogonal", worst < 1e-12, "max |v.m|/|v| = " + sci(worst)));
    }
    {
        // Start on the thermal cone, where the switching dynamics live.
        const double tilt = thermal_cone_rms_angle(device);
        const double drift =
            conservative_energy_drift(params, from_spherical(3.14159265358979323846 - tilt, 0.7), 0.0, 1e-12, 10000);
        out.push_back(check("energy_conservation", drift < 1e-4,
                            "relative drift = " + sci(drift) + " from a " + sci(tilt) + " rad tilt"));
    }
    {
        double worst = 0.0;
        for (const double u : {0.0, 0.7, 0.8}) {
            for (const auto& s : velocity_field_map(u, device, 8, {0.0, true, false})) {
                const Vec3 ref = llg_rhs(s.m, {s.h.hx, s.h.hy, s.h.hz}, device.spin_current(u, s.m), device);
                worst = std::max(worst, norm(s.velocity - ref) / std::max(norm(ref), 1e-300));
            }
        }
        out.push_back(check("velocity_map_matches_rhs", worst <= 1e-12, "max relative difference = " + sci(worst)));
    }
    {
        bool ok = true;
        for (std::size_t r : {1u, 3u, 8u}) {
            for (std::size_t c : {1u, 4u, 7u}) {
                const auto spec = CrossbarSpec::uniform(r, c, CellState::P, params);
                const auto cls = classify(spec, r - 1, 0);
                ok = ok && cls.counts.total() == r * c && cls.counts.selected == 1 &&
                     cls.counts.half_selected == r + c - 2;
            }
        }
        out.push_back(check("classify_counts", ok, "counts sum to R*C on 9 shapes"));
    }
    {
        double worst = 0.0;
        double kcl = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t r = 1 + static_cast<std::size_t>(rng.uniform() * 6);
            const std::size_t c = 1 + static_cast<std::size_t>(rng.uniform() * 6);
            ConductanceGrid grid{r, c, std::vector<double>(r * c)};
            for (auto& g : grid.g) g = 1.0 / (1e3 + 5e4 * rng.uniform());
            const std::size_t dr = static_cast<std::size_t>(rng.uniform() * r);
            const std::size_t dc = static_cast<std::size_t>(rng.uniform() * c);
            const auto sol = sneak_solve(grid, dr, dc, 0.7);
            const auto ref = dense_nodal_voltages(r, c, grid.g, dr, dc, 0.7);
            for (std::size_t i = 0; i < r; ++i) worst = std::max(worst, std::abs(sol.row_voltages[i] - ref[i]) / 0.7);
            for (std::size_t j = 0; j < c; ++j)
                worst = std::max(worst, std::abs(sol.col_voltages[j] - ref[r + j]) / 0.7);
            kcl = std::max(kcl, sol.residual / std::max(std::abs(sol.source_current), 1e-300));
        }
        out.push_back(check("sneak_vs_dense_oracle", worst < 1e-9 && kcl < 1e-9,
                            "max voltage error = " + sci(worst) + ", max KCL residual = " + sci(kcl)));
    }
    {
        ConductanceGrid grid{2, 2, {1e-3, 1e-3, 1e-3, 1e-3}};
        const auto sol = sneak_solve(grid, 0, 0, 1.0);
        const double sel = std::abs(sol.currents[0] - 1e-3);
        const double sneak = std::abs(sol.source_current - sol.currents[0] - 1e-3 / 3.0);
        out.push_back(check("sneak_2x2_analytic", sel < 1e-15 && sneak < 1e-15,
                            "selected error = " + sci(sel) + " A, sneak error = " + sci(sneak) + " A"));
    }
    {
        const auto spec = CrossbarSpec::uniform(3, 3, CellState::P, params);
        const double p_half = 0.05;
        const auto closed = write_disturb(spec, 1.0, p_half);
        const std::uint64_t reps = 4000;
        std::uint64_t disturbed = 0;
        for (std::uint64_t rep = 0; rep < reps; ++rep) {
            std::vector<int> hit(9, 0);
            for (std::size_t t = 0; t < 9; ++t) {
                const auto cls = classify(spec, t / 3, t % 3);
                for (std::size_t k = 0; k < 9; ++k) {
                    if (cls.membership[k] == CellClass::half_selected && rng.uniform() < p_half) hit[k] = 1;
                }
            }
            for (int h : hit) disturbed += static_cast<std::uint64_t>(h);
        }
        const auto ci = wilson_interval(disturbed, reps * 9);
        const bool ok = closed.per_cell >= ci.low && closed.per_cell <= ci.high;
        out.push_back(check("disturb_closed_form_vs_bitflip", ok,
                            "closed " + sci(closed.per_cell) + " vs simulated [" + sci(ci.low) + ", " + sci(ci.high) +
                                "]"));
    }
    {
        bool ok = true;
        for (std::uint64_t n : {1u, 7u, 100u, 4000u}) {
            for (std::uint64_t k = 0; k <= n; k += std::max<std::uint64_t>(1, n / 13)) {
                const auto e = make_estimate(k, n, 0);
                ok = ok && 0.0 <= e.ci_low && e.ci_low <= e.p && e.p <= e.ci_high && e.ci_high <= 1.0;
            }
        }
        out.push_back(check("wilson_bounds", ok, "0 <= low <= p <= high <= 1"));
    }
    {
        std::vector<double> phis, rotated;
        for (int k = 0; k < 200; ++k) {
            const double phi = 0.4 + 0.3 * rng.next() + (k % 2 ? 3.14159265358979323846 : 0.0);
            phis.push_back(phi);
            rotated.push_back(phi + 1.234);
        }
        const double d = std::abs(bimodal_concentration(phis) - bimodal_concentration(rotated));
        out.push_back(check("c2_rotation_invariant", d < 1e-12, "difference = " + sci(d)));
    }
    {
        SolverConfig quick = config;
        quick.t_init = 0.5e-9;
        quick.t_relax = 0.5e-9;
        const Waveform w = vcma_pulse(0.7, 1.0e-9);
        const auto a = estimate_probability(w, device, quick, 64, seed, 1);
        const auto b = estimate_probability(w, device, quick, 64, seed, std::max(2, threads));
        out.push_back(check("thread_determinism", a.n_switched == b.n_switched,
                            std::to_string(a.n_switched) + " vs " + std::to_string(b.n_switched) + " switches"));
    }
    {
        const Curve curve{{1.8e-9, make_estimate(3, 7, 0xFFFFFFFFFFFFFFFFull)}, {2e-9, make_estimate(0, 5, 1)}};
        const Curve back = read_curve_csv(curve_csv(curve, "# x\n"));
        bool ok = back.size() == curve.size();
        for (std::size_t i = 0; ok && i < curve.size(); ++i) {
            ok = back[i].x == curve[i].x && back[i].estimate.p == curve[i].estimate.p &&
                 back[i].estimate.seed == curve[i].estimate.seed &&
                 back[i].estimate.n_switched == curve[i].estimate.n_switched;
        }
        out.push_back(check("csv_round_trip", ok, "curve CSV re-read exactly"));
    }
    return out;
}

} // namespace vcma
