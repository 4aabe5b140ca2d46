#pragma once

#include <optional>

#include "vcma/vec3.hpp"

namespace vcma {

/// Diagonal demagnetizing tensor. Axes: x short in-plane, y long in-plane, z film normal.
struct DemagFactors {
    double nx = 0.0;
    double ny = 0.0;
    double nz = 0.0;

    double trace() const { return nx + ny + nz; }
};

/// Demag factors of a uniformly magnetized elliptical cylinder with in-plane
/// diameters `width` (x) and `length` (y) and thickness `thickness` (z).
/// Evaluated by numerical integration of the magnetostatic shape-function
/// kernel in reciprocal space; throws InvalidParameter on non-positive sizes.
DemagFactors elliptical_cylinder_demag(double width, double length, double thickness);

/// Converged elliptical_cylinder_demag(40 nm, 70 nm, 0.9 nm), frozen as a regression constant.
inline constexpr DemagFactors kTableIDemag{0.038469406893034, 0.017541166997261, 0.943989426109705};

/// elliptical_cylinder_demag() memoized per geometry; thread-safe. The default
/// geometry is served from kTableIDemag.
DemagFactors geometry_demag(double width, double length, double thickness);

/// Material, geometry and calibration constants for one MTJ. SI units.
struct DeviceParams {
    double width = 40e-9;             // W_MTJ, short in-plane axis (x)
    double length = 70e-9;            // L_MTJ, long in-plane axis (y)
    double free_thickness = 0.9e-9;   // t_FL
    double oxide_thickness = 1.3e-9;  // t_OX
    double saturation_magnetization = 1257.3e3;
    double damping = 0.075;
    double temperature = 300.0;
    double vcma_coefficient = 200e-15;       // xi, J/(V m)
    double interface_anisotropy = 0.9267e-3; // K_i, J/m^2

    // Calibration knobs.
    double polarization = 0.6;
    double r_parallel = 12e3;
    double r_antiparallel = 36e3;
    Vec3 pinned{0.0, 0.0, 1.0};
    /// Explicit demag tensor; empty means "use the elliptical-cylinder geometry".
    std::optional<DemagFactors> demag;

    /// Throws InvalidParameter naming the first violated invariant.
    /// `allow_zero_damping` admits alpha = 0 for conservative reference runs.
    void validate(bool allow_zero_damping = false) const;

    double volume() const;           // elliptical cylinder, m^3
    double spin_count() const;       // M_s V / mu_B
    double gyromagnetic_ratio() const; // 2 mu_B mu_0 / hbar, m/(A s)
    /// Zero-bias interface anisotropy field 2 K_i / (mu_0 M_s t_FL), A/m.
    double interface_anisotropy_field() const;
    /// Bias at which K_ieff vanishes, K_i t_OX / xi.
    double anisotropy_null_voltage() const;
};

/// Validated parameter set with the derived constants every field evaluation
/// needs. Construction is the only place where demag factors are computed.
class Device {
public:
    explicit Device(DeviceParams params);

    /// Conservative reference device: damping may be 0. Not for switching runs.
    struct Conservative {};
    Device(DeviceParams params, Conservative);

    const DeviceParams& params() const { return params_; }
    const DemagFactors& demag() const { return demag_; }

    double gamma() const { return gamma_; }
    double volume() const { return volume_; }
    double spin_count() const { return spin_count_; }
    /// 1 / (q N_s): converts a spin current (A) into a torque rate (1/s).
    double stt_prefactor() const { return stt_prefactor_; }

    /// Coefficient c(U) with H_VCMA = c(U) m_z z-hat.
    double anisotropy_coefficient(double voltage) const
    {
        return anisotropy_field0_ - anisotropy_slope_ * voltage;
    }

    /// Standard deviation of each thermal-field component for step dt.
    double thermal_sigma(double dt) const;

    /// Energy of the static (demag + anisotropy) field at bias U, J.
    double static_energy(const Vec3& m, double voltage) const;

    Vec3 demag_field(const Vec3& m) const
    {
        return {-demag_x_ * m.x, -demag_y_ * m.y, -demag_z_ * m.z};
    }

    Vec3 anisotropy_field(const Vec3& m, double voltage) const
    {
        return {0.0, 0.0, anisotropy_coefficient(voltage) * m.z};
    }

    /// Demag plus anisotropy; the deterministic part of H_eff.
    Vec3 static_field(const Vec3& m, double voltage) const
    {
        return {-demag_x_ * m.x, -demag_y_ * m.y, (anisotropy_coefficient(voltage) - demag_z_) * m.z};
    }

    double conductance(const Vec3& m) const
    {
        const double c = dot(m, params_.pinned);
        return 0.5 * (g_parallel_ * (1.0 + c) + g_antiparallel_ * (1.0 - c));
    }

    double resistance(const Vec3& m) const { return 1.0 / conductance(m); }

    Vec3 spin_current(double voltage, const Vec3& m) const
    {
        return params_.pinned * (params_.polarization * voltage * conductance(m));
    }

private:
    DeviceParams params_;
    DemagFactors demag_;
    double gamma_;
    double volume_;
    double spin_count_;
    double stt_prefactor_;
    double anisotropy_field0_;
    double anisotropy_slope_;
    double demag_x_, demag_y_, demag_z_;
    double g_parallel_, g_antiparallel_;
};

// Free-function forms of the device operations.

/// Cached demag factors of `params` (explicit tensor or geometry).
DemagFactors demag_factors(const DeviceParams& params);

Vec3 demag_field(const Vec3& m, const Device& device);
Vec3 anisotropy_field(const Vec3& m, double voltage, const Device& device);
/// sigma * g, where g is a triple of standard normal samples. Throws on dt <= 0.
Vec3 thermal_field(const Device& device, double dt, const Vec3& g);
double resistance(const Vec3& m, const Device& device);
Vec3 spin_current(double voltage, const Vec3& m, const Device& device);

} // namespace vcma
