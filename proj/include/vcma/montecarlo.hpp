#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vcma/device.hpp"
#include "vcma/dynamics.hpp"
#include "vcma/waveform.hpp"

namespace vcma {

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Two-sided Wilson score interval for k successes in n trials.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct SwitchEstimate {
    double p = 0.0;
    std::uint64_t n_trials = 0;
    std::uint64_t n_switched = 0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t seed = 0;

    double ci_width() const { return ci_high - ci_low; }
};

SwitchEstimate make_estimate(std::uint64_t switched, std::uint64_t trials, std::uint64_t seed);

struct CurvePoint {
    double x = 0.0; // swept quantity, SI
    SwitchEstimate estimate;
};

using Curve = std::vector<CurvePoint>;

/// Runs trials 0..n_trials-1 of simulate() under `seed` and counts switches.
SwitchEstimate estimate_probability(const Waveform& waveform, const Device& device, const SolverConfig& config,
                                    std::uint64_t n_trials, std::uint64_t seed, int threads = 1);

/// Seed used for point `index` of a sweep rooted at `seed`.
inline std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index) { return derive_seed(seed, index); }

Curve sweep_width(double voltage, std::span<const double> widths, const Device& device, const SolverConfig& config,
                  std::uint64_t n_trials, std::uint64_t seed, int threads = 1);

Curve sweep_amplitude(double width, std::span<const double> amplitudes, const Device& device,
                      const SolverConfig& config, std::uint64_t n_trials, std::uint64_t seed, int threads = 1);

/// The VCMA-then-STT program used by the combined-pulse experiments.
struct CombinedPulseSpec {
    double vcma_voltage = 0.7;
    double vcma_width = 1.8e-9;
    double stt_voltage = 0.6;
};

/// Combined program with a follow-up STT segment of width `follow` (may be 0).
Waveform combined_program(const CombinedPulseSpec& spec, double follow);

/// Single-amplitude STT program of the same total length.
Waveform pure_stt_program(const CombinedPulseSpec& spec, double follow);

struct PairedPoint {
    double follow_width = 0.0;
    SwitchEstimate first;  // combined (or full-select)
    SwitchEstimate second; // pure STT (or half-select)
};

/// Combined VCMA-STT vs. pure STT of equal duration. Both curves share the
/// per-point seed, so the comparison is paired.
std::vector<PairedPoint> compare_pure_stt(std::span<const double> follow_widths, const Device& device,
                                          const SolverConfig& config, std::uint64_t n_trials, std::uint64_t seed,
                                          const CombinedPulseSpec& spec = {}, int threads = 1);

/// Full-select combined program vs. the same program scaled by 1/2.
std::vector<PairedPoint> half_select_contrast(std::span<const double> follow_widths, const Device& device,
                                              const SolverConfig& config, std::uint64_t n_trials,
                                              std::uint64_t seed, const CombinedPulseSpec& spec = {},
                                              int threads = 1);

} // namespace vcma
