#include "vcma/dynamics.hpp"

#include <cmath>

#include "vcma/errors.hpp"

namespace vcma {

void SolverConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidParameter("solver: dt must be > 0");
    }
    if (!(t_init >= 0.0) || !(t_relax >= 0.0)) {
        throw InvalidParameter("solver: t_init and t_relax must be >= 0");
    }
    if (record_stride < 1) {
        throw InvalidParameter("solver: record_stride must be >= 1");
    }
}

std::int64_t step_count(double t, double dt)
{
    if (t <= 0.0) {
        return 0;
    }
    return static_cast<std::int64_t>(std::ceil(t / dt - 0.5));
}

HeunIntegrator::HeunIntegrator(const Device& device, double dt) : device_(&device), dt_(dt)
{
    sigma_ = device.thermal_sigma(dt);
    neg_gamma_ = -device.gamma();
    stt_ = device.stt_prefactor();
    alpha_ = device.params().damping;
    inv_norm_ = 1.0 / (1.0 + alpha_ * alpha_);
}

Vec3 sample_initial(const Device& device, const SolverConfig& config, NormalStream& noise)
{
    config.validate();
    const HeunIntegrator integ(device, config.dt);
    Vec3 m{0.0, 0.0, -1.0};
    integ.run(m, 0.0, step_count(config.t_init, config.dt), noise, [](const Vec3&) { return true; });
    return m;
}

Trajectory simulate(const Waveform& waveform, const Device& device, const SolverConfig& config, std::uint64_t seed,
                    std::uint64_t trial_index)
{
    config.validate();
    NormalStream noise(trial_stream_seed(seed, trial_index));
    const HeunIntegrator integ(device, config.dt);
    Vec3 m = sample_initial(device, config, noise);

    Trajectory traj;
    traj.samples.push_back({0.0, m, waveform.voltage_at(0.0)});
    const auto stride = static_cast<std::int64_t>(config.record_stride);
    TrajectorySample tail{};
    drive(integ, waveform, config.t_relax, m, noise, [&](std::int64_t k, double t, const Vec3& mm, double u) {
        tail = {t, mm, u};
        if (k % stride == 0) {
            traj.samples.push_back(tail);
        }
    });
    if (tail.t > traj.samples.back().t) {
        traj.samples.push_back(tail);
    }
    traj.final_state = m;
    traj.switched = m.z > 0.0;
    return traj;
}

bool simulate_switch(const Waveform& waveform, const Device& device, const SolverConfig& config,
                     std::uint64_t seed, std::uint64_t trial_index)
{
    NormalStream noise(trial_stream_seed(seed, trial_index));
    const HeunIntegrator integ(device, config.dt);
    Vec3 m = sample_initial(device, config, noise);
    drive(integ, waveform, config.t_relax, m, noise, [](std::int64_t, double, const Vec3&, double) {});
    return m.z > 0.0;
}

} // namespace vcma
