#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vcma/device.hpp"
#include "vcma/dynamics.hpp"
#include "vcma/vec3.hpp"

namespace vcma {

/// Deterministic field (demag + VCMA anisotropy) split by axis.
struct FieldComponents {
    double hx = 0.0;
    double hy = 0.0;
    double hz = 0.0;
};

FieldComponents field_components(const Vec3& m, double voltage, const Device& device);

struct FieldSample {
    double theta = 0.0; // polar angle from +z
    double phi = 0.0;   // azimuth
    Vec3 m;
    FieldComponents h;
    Vec3 velocity;      // deterministic dm/dt, 1/s
    // Separated precession fields -gamma m x H_i (only filled on request).
    Vec3 precession_x, precession_y, precession_z;
};

enum class Axis { x = 0, y = 1, z = 2 };

/// Axes sorted by increasing field strength, e.g. {x, z, y} reads |Hx| < |Hz| < |Hy|.
using AxisOrdering = std::array<Axis, 3>;

std::string to_string(const AxisOrdering& ordering);

/// Field strength along each axis at m: |dH_i/dm_i|, the field that axis
/// contributes per unit of magnetization projected on it. On-axis the raw
/// in-plane components vanish, so the strength rather than the component
/// is what ranks the axes near the pole.
std::array<double, 3> axis_field_strength(const Vec3& m, double voltage, const Device& device);

struct OrderingVerdict {
    AxisOrdering majority{};
    double agreement = 0.0; // fraction of grid points with the majority ordering
    std::size_t points = 0;
    double tilt = 0.0;      // polar tilt from the south pole at which the ring was sampled
};

/// RMS polar tilt of the zero-bias thermal cone around the south pole, from
/// the small-angle Boltzmann distribution of the biaxial well.
double thermal_cone_rms_angle(const Device& device);

/// Ranks |Hx|, |Hy|, |Hz| over a grid on the polar cap around the south pole.
/// `tilt` <= 0 selects the thermal-cone RMS angle. Grid: grid_n azimuths on
/// rings at tilt/2, tilt and min(2 tilt, cap_angle).
OrderingVerdict ordering_in_cap(double voltage, const Device& device, double cap_angle, int grid_n,
                                double tilt = 0.0);

struct MapOptions {
    double cap_angle = 0.0;  // 0: whole sphere; otherwise polar cap around the south pole
    bool include_stt = false;
    bool separate_precession = false;
};

/// Deterministic velocity field on a latitude-longitude grid (grid_n x 2 grid_n).
std::vector<FieldSample> velocity_field_map(double voltage, const Device& device, int grid_n,
                                            const MapOptions& options = {});

struct ExitHistogram {
    std::vector<std::uint64_t> counts; // azimuth bins over [-pi, pi)
    std::vector<double> exit_azimuths;
    std::uint64_t exited = 0;
    std::uint64_t never_exited = 0;
    double concentration = 0.0; // C2 = |<exp(2 i phi)>|
};

struct ExitOptions {
    double exit_angle = 30.0 * 3.14159265358979323846 / 180.0; // from the south pole
    double window = 5e-9;                                      // maximum bias duration, s
    int bins = 36;
};

/// Second circular moment |<exp(2 i phi)>| of a set of azimuths, in [0, 1].
double bimodal_concentration(std::span<const double> azimuths);

/// For each trial: thermalize, apply `voltage`, record the azimuth at the first
/// crossing of the exit cone. Trials that stay inside for the whole window are
/// counted in never_exited.
ExitHistogram exit_histogram(double voltage, const Device& device, const SolverConfig& config,
                             std::uint64_t n_trials, std::uint64_t seed, const ExitOptions& options = {},
                             int threads = 1);

} // namespace vcma
