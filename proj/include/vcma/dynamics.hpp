#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "vcma/device.hpp"
#include "vcma/rng.hpp"
#include "vcma/vec3.hpp"
#include "vcma/waveform.hpp"

namespace vcma {

enum class Scheme { heun };

struct SolverConfig {
    double dt = 1e-12;      // s
    double t_init = 3e-9;   // zero-bias thermalization before the waveform
    double t_relax = 3e-9;  // zero-bias relaxation after the waveform
    int record_stride = 10; // steps between stored trajectory samples
    Scheme scheme = Scheme::heun;

    void validate() const;
};

struct TrajectorySample {
    double t = 0.0; // s, measured from the start of the waveform
    Vec3 m;
    double voltage = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Vec3 final_state;
    bool switched = false;
};

/// Explicit LLG right-hand side with spin-transfer torque:
/// A = -gamma m x H + (1/(q N_s)) m x (I_s x m),  dm/dt = (A + alpha m x A) / (1 + alpha^2).
inline Vec3 llg_rhs(const Vec3& m, const Vec3& h_eff, const Vec3& spin_current, const Device& device)
{
    const double alpha = device.params().damping;
    const Vec3 a = -device.gamma() * cross(m, h_eff) + device.stt_prefactor() * cross(m, cross(spin_current, m));
    return (a + alpha * cross(m, a)) / (1.0 + alpha * alpha);
}

/// Number of whole steps of size dt covering [0, t]; a step belongs to the
/// interval containing its midpoint.
std::int64_t step_count(double t, double dt);

/// Stochastic Heun integrator. One thermal-field draw per step is shared by
/// predictor and corrector; the result is renormalized onto the sphere.
class HeunIntegrator {
public:
    HeunIntegrator(const Device& device, double dt);

    const Device& device() const { return *device_; }
    double dt() const { return dt_; }
    double sigma() const { return sigma_; }

    Vec3 step(const Vec3& m, double voltage, NormalStream& noise) const
    {
        const Vec3 h_th = sigma_ > 0.0 ? noise.next_vec3() * sigma_ : Vec3{};
        return step_with_field(m, voltage, h_th);
    }

    /// Same as step() with the thermal field supplied by the caller.
    Vec3 step_with_field(const Vec3& m, double voltage, const Vec3& h_thermal) const
    {
        const Vec3 f0 = rhs(m, voltage, h_thermal);
        const Vec3 pred = m + dt_ * f0;
        const Vec3 f1 = rhs(pred, voltage, h_thermal);
        const Vec3 next = m + (0.5 * dt_) * (f0 + f1);
        return next * (1.0 / std::sqrt(dot(next, next)));
    }

    /// llg_rhs() with the device constants folded in; same arithmetic up to rounding.
    Vec3 rhs(const Vec3& m, double voltage, const Vec3& h_thermal) const
    {
        const Vec3 h = device_->static_field(m, voltage) + h_thermal;
        const Vec3 torque = cross(m, h);
        Vec3 a = torque * neg_gamma_;
        if (voltage != 0.0) {
            a += cross(m, cross(device_->spin_current(voltage, m), m)) * stt_;
        }
        return (a + alpha_ * cross(m, a)) * inv_norm_;
    }

    /// Integrate `n` steps at constant bias, calling obs(m) after each step.
    /// Stops early if obs returns false; returns the number of steps taken.
    template <class Observer>
    std::int64_t run(Vec3& m, double voltage, std::int64_t n, NormalStream& noise, Observer&& obs) const
    {
        for (std::int64_t k = 0; k < n; ++k) {
            m = step(m, voltage, noise);
            if (!obs(m)) {
                return k + 1;
            }
        }
        return n;
    }

private:
    const Device* device_;
    double dt_;
    double sigma_;
    double neg_gamma_;
    double stt_;
    double alpha_;
    double inv_norm_;
};

inline Vec3 heun_step(const Vec3& m, double voltage, double dt, const Device& device, NormalStream& noise)
{
    return HeunIntegrator(device, dt).step(m, voltage, noise);
}

/// Thermalized starting state: -z, then t_init of zero-bias dynamics.
Vec3 sample_initial(const Device& device, const SolverConfig& config, NormalStream& noise);

/// RNG stream seed for trial `trial_index` under `seed`.
inline std::uint64_t trial_stream_seed(std::uint64_t seed, std::uint64_t trial_index)
{
    return derive_seed(seed, trial_index);
}

/// Full trial: thermalize, drive with `waveform`, relax at zero bias.
/// `switched` is m_z > 0 at the end of relaxation. Stores every
/// record_stride-th step plus the first and last states.
Trajectory simulate(const Waveform& waveform, const Device& device, const SolverConfig& config, std::uint64_t seed,
                    std::uint64_t trial_index);

/// simulate() without storing the path; the Monte Carlo hot path.
bool simulate_switch(const Waveform& waveform, const Device& device, const SolverConfig& config,
                     std::uint64_t seed, std::uint64_t trial_index);

/// Drive `m` through every segment of `waveform` followed by t_relax at zero
/// bias. Invokes obs(step_index, t, m, voltage) after each step.
template <class Observer>
void drive(const HeunIntegrator& integ, const Waveform& waveform, double t_relax, Vec3& m, NormalStream& noise,
           Observer&& obs)
{
    const double dt = integ.dt();
    std::int64_t k = 0;
    double boundary = 0.0;
    for (const auto& seg : waveform.segments()) {
        boundary += seg.duration;
        const std::int64_t end = step_count(boundary, dt);
        for (; k < end; ++k) {
            m = integ.step(m, seg.voltage, noise);
            obs(k + 1, static_cast<double>(k + 1) * dt, m, seg.voltage);
        }
    }
    const std::int64_t end = k + step_count(t_relax, dt);
    for (; k < end; ++k) {
        m = integ.step(m, 0.0, noise);
        obs(k + 1, static_cast<double>(k + 1) * dt, m, 0.0);
    }
}

} // namespace vcma
