#include <doctest.h>

#include <cmath>
#include <random>

#include "vcma/montecarlo.hpp"

using namespace vcma;

namespace {

SolverConfig quick()
{
    SolverConfig c;
    c.t_init = 1e-9;
    c.t_relax = 1e-9;
    return c;
}

} // namespace

TEST_CASE("Wilson interval closed form")
{
    const double z = 1.959963984540054;
    for (auto [k, n] : {std::pair<std::uint64_t, std::uint64_t>{0, 4000}, {3684, 4000}, {7, 10}, {1, 1}}) {
        const double p = static_cast<double>(k) / n;
        const double nn = static_cast<double>(n);
        const double centre = (p + z * z / (2 * nn)) / (1 + z * z / nn);
        const double half = z / (1 + z * z / nn) * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn));
        const auto ci = wilson_interval(k, n);
        CHECK(ci.low == doctest::Approx(std::max(0.0, centre - half)).epsilon(1e-12));
        CHECK(ci.high == doctest::Approx(std::min(1.0, centre + half)).epsilon(1e-12));
    }
    CHECK(wilson_interval(0, 4000).high == doctest::Approx(z * z / (4000 + z * z)).epsilon(1e-12));
}

TEST_CASE("Wilson coverage on a Bernoulli oracle")
{
    std::mt19937_64 gen(2718);
    for (double p : {0.05, 0.3, 0.5, 0.921}) {
        for (std::uint64_t n : {200u, 4000u}) {
            std::binomial_distribution<std::uint64_t> draw(n, p);
            int covered = 0;
            const int reps = 10000;
            for (int r = 0; r < reps; ++r) {
                const auto ci = wilson_interval(draw(gen), n);
                covered += ci.low <= p && p <= ci.high;
            }
            const double coverage = static_cast<double>(covered) / reps;
            CAPTURE(p);
            CAPTURE(n);
            CHECK(coverage >= 0.93);
            CHECK(coverage <= 0.97);
        }
    }
}

TEST_CASE("estimate invariants")
{
    for (std::uint64_t n : {1u, 13u, 4000u}) {
        for (std::uint64_t k = 0; k <= n; k += std::max<std::uint64_t>(1, n / 7)) {
            const auto e = make_estimate(k, n, 5);
            CHECK(0.0 <= e.ci_low);
            CHECK(e.ci_low <= e.p);
            CHECK(e.p <= e.ci_high);
            CHECK(e.ci_high <= 1.0);
            CHECK(e.p == static_cast<double>(k) / n);
            CHECK(e.seed == 5);
        }
    }
}

TEST_CASE("estimates are independent of the worker count")
{
    const Device d{DeviceParams{}};
    const Waveform w = vcma_pulse(0.7, 1.8e-9);
    const auto a = estimate_probability(w, d, quick(), 96, 4242, 1);
    const auto b = estimate_probability(w, d, quick(), 96, 4242, 4);
    CHECK(a.n_switched == b.n_switched);
    CHECK(a.seed == 4242);
    std::uint64_t manual = 0;
    for (std::uint64_t i = 0; i < 96; ++i) manual += simulate_switch(w, d, quick(), 4242, i);
    CHECK(manual == a.n_switched);

    const std::vector<double> widths{1e-9, 1.8e-9};
    const auto c1 = sweep_width(0.7, widths, d, quick(), 48, 9, 1);
    const auto c3 = sweep_width(0.7, widths, d, quick(), 48, 9, 3);
    for (std::size_t i = 0; i < widths.size(); ++i) {
        CHECK(c1[i].x == widths[i]);
        CHECK(c1[i].estimate.n_switched == c3[i].estimate.n_switched);
        CHECK(c1[i].estimate.seed == point_seed(9, i));
    }
}

TEST_CASE("zero bias gives a flat zero curve")
{
    const Device d{DeviceParams{}};
    const std::vector<double> widths{1e-9, 5e-9};
    for (const auto& pt : sweep_width(0.0, widths, d, quick(), 200, 1, 1)) CHECK(pt.estimate.p == 0.0);
    const std::vector<double> amps{0.0};
    CHECK(sweep_amplitude(1.8e-9, amps, d, quick(), 200, 1, 1)[0].estimate.p == 0.0);
}

TEST_CASE("combined program reduces to the VCMA point at zero follow width")
{
    const CombinedPulseSpec spec;
    CHECK(combined_program(spec, 0.0).merged() == vcma_pulse(0.7, 1.8e-9));
    const Waveform c9 = combined_program(spec, 9e-9);
    CHECK(c9 == combined_pulse(0.7, 1.8e-9, 0.6, 9e-9));
    const Waveform s9 = pure_stt_program(spec, 9e-9);
    CHECK(s9.duration() == doctest::Approx(c9.duration()).epsilon(1e-15));
    for (const auto& seg : s9.segments()) CHECK(seg.voltage == 0.6);

    const Device d{DeviceParams{}};
    const std::vector<double> follow{0.0};
    const auto paired = compare_pure_stt(follow, d, quick(), 64, 77, spec, 1);
    const auto direct = estimate_probability(vcma_pulse(0.7, 1.8e-9), d, quick(), 64, point_seed(77, 0), 1);
    CHECK(paired[0].first.n_switched == direct.n_switched);
}

TEST_CASE("half-select program is the full program at half voltage")
{
    const Device d{DeviceParams{}};
    const std::vector<double> follow{2e-9};
    const CombinedPulseSpec spec;
    const auto r = half_select_contrast(follow, d, quick(), 64, 5, spec, 1);
    const auto half = estimate_probability(combined_program(spec, 2e-9).scaled(0.5), d, quick(), 64,
                                           point_seed(5, 0), 1);
    CHECK(r[0].second.n_switched == half.n_switched);
    CHECK(r[0].second.p == 0.0);
}
