#include "vcma/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "vcma/constants.hpp"
#include "vcma/errors.hpp"
#include "vcma/parallel.hpp"

namespace vcma {

using constants::pi;

FieldComponents field_components(const Vec3& m, double voltage, const Device& device)
{
    const Vec3 h = device.demag_field(m) + device.anisotropy_field(m, voltage);
    return {h.x, h.y, h.z};
}

std::string to_string(const AxisOrdering& ordering)
{
    static constexpr const char* names[] = {"|Hx|", "|Hy|", "|Hz|"};
    std::string s;
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        if (i) {
            s += " < ";
        }
        s += names[static_cast<int>(ordering[i])];
    }
    return s;
}

std::array<double, 3> axis_field_strength(const Vec3& m, double voltage, const Device& device)
{
    constexpr double h = 1e-4;
    auto component = [&](const Vec3& v, int axis) {
        const auto f = field_components(v, voltage, device);
        return axis == 0 ? f.hx : axis == 1 ? f.hy : f.hz;
    };
    std::array<double, 3> out{};
    for (int axis = 0; axis < 3; ++axis) {
        Vec3 e{};
        (axis == 0 ? e.x : axis == 1 ? e.y : e.z) = h;
        out[axis] = std::abs(component(m + e, axis) - component(m - e, axis)) / (2.0 * h);
    }
    return out;
}

double thermal_cone_rms_angle(const Device& device)
{
    const auto& p = device.params();
    if (p.temperature <= 0.0) {
        return 0.0;
    }
    const double ms = p.saturation_magnetization;
    const double kx = ms * device.demag().nx;
    const double ky = ms * device.demag().ny;
    const double kz = ms * device.demag().nz - device.anisotropy_coefficient(0.0);
    if (!(kx > kz) || !(ky > kz)) {
        throw InvalidParameter("thermal cone: the south pole is not a zero-bias energy minimum");
    }
    const double scale = constants::mu0 * ms * device.volume();
    const double kt = constants::boltzmann * p.temperature;
    return std::sqrt(kt / (scale * (kx - kz)) + kt / (scale * (ky - kz)));
}

OrderingVerdict ordering_in_cap(double voltage, const Device& device, double cap_angle, int grid_n, double tilt)
{
    if (!(cap_angle > 0.0 && cap_angle < 0.5 * pi)) {
        throw InvalidParameter("ordering_in_cap: cap angle must lie in (0, pi/2)");
    }
    if (grid_n < 1) {
        throw InvalidParameter("ordering_in_cap: grid_n must be >= 1");
    }
    if (tilt <= 0.0) {
        tilt = thermal_cone_rms_angle(device);
    }
    tilt = std::clamp(tilt, 1e-6, cap_angle);

    std::map<AxisOrdering, std::size_t> votes;
    std::size_t total = 0;
    for (double ring : {0.5 * tilt, tilt, std::min(2.0 * tilt, cap_angle)}) {
        for (int j = 0; j < grid_n; ++j) {
            const double phi = 2.0 * pi * (j + 0.5) / grid_n;
            const Vec3 m = from_spherical(pi - ring, phi);
            const auto s = axis_field_strength(m, voltage, device);
            AxisOrdering order{Axis::x, Axis::y, Axis::z};
            std::stable_sort(order.begin(), order.end(),
                             [&](Axis a, Axis b) { return s[static_cast<int>(a)] < s[static_cast<int>(b)]; });
            ++votes[order];
            ++total;
        }
    }
    OrderingVerdict v;
    v.points = total;
    v.tilt = tilt;
    std::size_t best = 0;
    for (const auto& [order, count] : votes) {
        if (count > best) {
            best = count;
            v.majority = order;
        }
    }
    v.agreement = static_cast<double>(best) / static_cast<double>(total);
    return v;
}

std::vector<FieldSample> velocity_field_map(double voltage, const Device& device, int grid_n,
                                            const MapOptions& options)
{
    if (grid_n < 8) {
        throw InvalidParameter("velocity_field_map: grid_n must be >= 8");
    }
    const double theta_lo = options.cap_angle > 0.0 ? pi - options.cap_angle : 0.0;
    const double theta_span = pi - theta_lo;
    const double gamma = device.gamma();
    std::vector<FieldSample> out;
    out.reserve(static_cast<std::size_t>(grid_n) * 2 * grid_n);
    for (int i = 0; i < grid_n; ++i) {
        const double theta = theta_lo + theta_span * (i + 0.5) / grid_n;
        for (int j = 0; j < 2 * grid_n; ++j) {
            const double phi = -pi + 2.0 * pi * (j + 0.5) / (2 * grid_n);
            FieldSample s;
            s.theta = theta;
            s.phi = phi;
            s.m = from_spherical(theta, phi);
            s.h = field_components(s.m, voltage, device);
            const Vec3 spin = options.include_stt ? device.spin_current(voltage, s.m) : Vec3{};
            s.velocity = llg_rhs(s.m, {s.h.hx, s.h.hy, s.h.hz}, spin, device);
            if (options.separate_precession) {
                s.precession_x = -gamma * cross(s.m, Vec3{s.h.hx, 0.0, 0.0});
                s.precession_y = -gamma * cross(s.m, Vec3{0.0, s.h.hy, 0.0});
                s.precession_z = -gamma * cross(s.m, Vec3{0.0, 0.0, s.h.hz});
            }
            out.push_back(s);
        }
    }
    return out;
}

double bimodal_concentration(std::span<const double> azimuths)
{
    if (azimuths.empty()) {
        return 0.0;
    }
    std::complex<double> sum{0.0, 0.0};
    for (double phi : azimuths) {
        sum += std::polar(1.0, 2.0 * phi);
    }
    return std::abs(sum) / static_cast<double>(azimuths.size());
}

ExitHistogram exit_histogram(double voltage, const Device& device, const SolverConfig& config,
                             std::uint64_t n_trials, std::uint64_t seed, const ExitOptions& options, int threads)
{
    if (n_trials < 1) {
        throw InvalidParameter("exit_histogram: n_trials must be >= 1");
    }
    if (!(options.exit_angle > 0.0 && options.exit_angle < pi) || options.bins < 1 || !(options.window > 0.0)) {
        throw InvalidParameter("exit_histogram: invalid exit angle, window or bin count");
    }
    config.validate();
    const double cos_exit = std::cos(options.exit_angle);
    const std::int64_t max_steps = step_count(options.window, config.dt);

    std::vector<double> azimuth(n_trials, 0.0);
    std::vector<unsigned char> exited(n_trials, 0);
    parallel_for(n_trials, threads, [&](std::size_t i) {
        NormalStream noise(trial_stream_seed(seed, i));
        const HeunIntegrator integ(device, config.dt);
        Vec3 m = sample_initial(device, config, noise);
        bool out = false;
        integ.run(m, voltage, max_steps, noise, [&](const Vec3& mm) {
            out = -mm.z < cos_exit;
            return !out;
        });
        if (out) {
            exited[i] = 1;
            azimuth[i] = std::atan2(m.y, m.x);
        }
    });

    ExitHistogram h;
    h.counts.assign(static_cast<std::size_t>(options.bins), 0);
    for (std::size_t i = 0; i < n_trials; ++i) {
        if (!exited[i]) {
            ++h.never_exited;
            continue;
        }
        ++h.exited;
        h.exit_azimuths.push_back(azimuth[i]);
        auto bin = static_cast<std::size_t>(std::floor((azimuth[i] + pi) / (2.0 * pi) * options.bins));
        h.counts[std::min(bin, h.counts.size() - 1)] += 1;
    }
    h.concentration = bimodal_concentration(h.exit_azimuths);
    return h;
}

} // namespace vcma
