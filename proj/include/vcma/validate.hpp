#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcma/device.hpp"
#include "vcma/dynamics.hpp"

namespace vcma {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast invariant checks over every module: sphere constraint, torque
/// orthogonality, conservation, nodal-solver agreement with a dense oracle,
/// disturb model vs. bit-flip simulation, statistics and determinism.
std::vector<CheckResult> run_property_suite(const DeviceParams& params, const SolverConfig& config,
                                            std::uint64_t seed, int threads = 1);

/// Relative energy drift of a conservative run: damping 0, T = 0, no current,
/// `steps` Heun steps of `dt` from `m0` at bias `voltage`.
double conservative_energy_drift(const DeviceParams& params, const Vec3& m0, double voltage, double dt,
                                 std::int64_t steps);

/// Dense Gauss-Jordan solve of the full (R+C)-node Laplacian with the driven
/// rows replaced by identity rows. Independent of sneak_solve.
std::vector<double> dense_nodal_voltages(std::size_t rows, std::size_t cols, const std::vector<double>& g,
                                         std::size_t driven_row, std::size_t driven_col, double voltage);

} // namespace vcma
