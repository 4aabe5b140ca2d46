#include "vcma/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "vcma/errors.hpp"
#include "vcma/parallel.hpp"

namespace vcma {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z)
{
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    // Clamp round-off so that low <= p <= high holds exactly at k = 0 and k = n.
    return {std::clamp(std::min(centre - half, p), 0.0, 1.0), std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

SwitchEstimate make_estimate(std::uint64_t switched, std::uint64_t trials, std::uint64_t seed)
{
    SwitchEstimate e;
    e.n_trials = trials;
    e.n_switched = switched;
    e.p = trials ? static_cast<double>(switched) / static_cast<double>(trials) : 0.0;
    const auto ci = wilson_interval(switched, trials);
    e.ci_low = ci.low;
    e.ci_high = ci.high;
    e.seed = seed;
    return e;
}

SwitchEstimate estimate_probability(const Waveform& waveform, const Device& device, const SolverConfig& config,
                                    std::uint64_t n_trials, std::uint64_t seed, int threads)
{
    if (n_trials < 1) {
        throw InvalidParameter("estimate_probability: n_trials must be >= 1");
    }
    config.validate();
    std::vector<unsigned char> outcome(n_trials, 0);
    parallel_for(n_trials, threads, [&](std::size_t i) {
        outcome[i] = simulate_switch(waveform, device, config, seed, i) ? 1 : 0;
    });
    std::uint64_t switched = 0;
    for (auto o : outcome) {
        switched += o;
    }
    return make_estimate(switched, n_trials, seed);
}

namespace {

template <class MakeWaveform>
Curve sweep(std::span<const double> xs, MakeWaveform&& make, const Device& device, const SolverConfig& config,
            std::uint64_t n_trials, std::uint64_t seed, int threads)
{
    if (xs.empty()) {
        throw InvalidParameter("sweep: at least one point required");
    }
    Curve curve;
    curve.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Waveform w = make(xs[i]);
        curve.push_back({xs[i], estimate_probability(w, device, config, n_trials, point_seed(seed, i), threads)});
    }
    return curve;
}

} // namespace

Curve sweep_width(double voltage, std::span<const double> widths, const Device& device, const SolverConfig& config,
                  std::uint64_t n_trials, std::uint64_t seed, int threads)
{
    return sweep(
        widths, [voltage](double w) { return vcma_pulse(voltage, w); }, device, config, n_trials, seed, threads);
}

Curve sweep_amplitude(double width, std::span<const double> amplitudes, const Device& device,
                      const SolverConfig& config, std::uint64_t n_trials, std::uint64_t seed, int threads)
{
    return sweep(
        amplitudes, [width](double u) { return vcma_pulse(u, width); }, device, config, n_trials, seed, threads);
}

Waveform combined_program(const CombinedPulseSpec& spec, double follow)
{
    if (!(spec.vcma_width > 0.0) || !(follow >= 0.0)) {
        throw InvalidParameter("combined program: widths must be positive");
    }
    return Waveform({{spec.vcma_voltage, spec.vcma_width}, {spec.stt_voltage, follow}});
}

Waveform pure_stt_program(const CombinedPulseSpec& spec, double follow)
{
    if (!(spec.vcma_width > 0.0) || !(follow >= 0.0)) {
        throw InvalidParameter("pure STT program: widths must be positive");
    }
    return Waveform({{spec.stt_voltage, spec.vcma_width}, {spec.stt_voltage, follow}});
}

namespace {

template <class MakePair>
std::vector<PairedPoint> paired(std::span<const double> follow_widths, MakePair&& make, const Device& device,
                                const SolverConfig& config, std::uint64_t n_trials, std::uint64_t seed, int threads)
{
    if (follow_widths.empty()) {
        throw InvalidParameter("paired sweep: at least one follow width required");
    }
    std::vector<PairedPoint> out;
    for (std::size_t i = 0; i < follow_widths.size(); ++i) {
        const auto [a, b] = make(follow_widths[i]);
        const std::uint64_t s = point_seed(seed, i);
        out.push_back({follow_widths[i], estimate_probability(a, device, config, n_trials, s, threads),
                       estimate_probability(b, device, config, n_trials, s, threads)});
    }
    return out;
}

} // namespace

std::vector<PairedPoint> compare_pure_stt(std::span<const double> follow_widths, const Device& device,
                                          const SolverConfig& config, std::uint64_t n_trials, std::uint64_t seed,
                                          const CombinedPulseSpec& spec, int threads)
{
    return paired(
        follow_widths,
        [&spec](double w) { return std::pair{combined_program(spec, w), pure_stt_program(spec, w)}; }, device,
        config, n_trials, seed, threads);
}

std::vector<PairedPoint> half_select_contrast(std::span<const double> follow_widths, const Device& device,
                                              const SolverConfig& config, std::uint64_t n_trials,
                                              std::uint64_t seed, const CombinedPulseSpec& spec, int threads)
{
    return paired(
        follow_widths,
        [&spec](double w) {
            Waveform full = combined_program(spec, w);
            Waveform half = full.scaled(0.5);
            return std::pair{std::move(full), std::move(half)};
        },
        device, config, n_trials, seed, threads);
}

} // namespace vcma
