#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vcma/dynamics.hpp"
#include "vcma/errors.hpp"
#include "vcma/montecarlo.hpp"
#include "vcma/validate.hpp"

using namespace vcma;

namespace {

// Solves the implicit Gilbert form v = -gamma m x H + stt + alpha m x v by
// fixed-point iteration.
Vec3 gilbert_implicit(const Vec3& m, const Vec3& h, const Vec3& is, double gamma, double alpha, double stt)
{
    const Vec3 a = -gamma * cross(m, h) + stt * cross(m, cross(is, m));
    Vec3 v = a;
    for (int k = 0; k < 200; ++k) v = a + alpha * cross(m, v);
    return v;
}

DeviceParams lossless()
{
    DeviceParams p;
    p.damping = 0.0;
    p.temperature = 0.0;
    return p;
}

} // namespace

TEST_CASE("llg_rhs examples")
{
    const Device d{DeviceParams{}};
    const double g = d.gamma();
    const double h0 = 1e5;

    CHECK(llg_rhs(normalized(Vec3{1, 2, 3}), normalized(Vec3{1, 2, 3}) * 4e5, {}, d) == Vec3{0, 0, 0});

    const Device free_prec(lossless(), Device::Conservative{});
    const Vec3 v0 = llg_rhs({1, 0, 0}, {0, 0, h0}, {}, free_prec);
    CHECK(v0.x == 0.0);
    CHECK(v0.y == doctest::Approx(g * h0).epsilon(1e-14));
    CHECK(v0.z == 0.0);

    const double alpha = 0.075;
    const Vec3 v = llg_rhs({1, 0, 0}, {0, 0, h0}, {}, d);
    CHECK(v.x == 0.0);
    CHECK(v.y == doctest::Approx(g * h0 / (1 + alpha * alpha)).epsilon(1e-14));
    CHECK(v.z == doctest::Approx(alpha * g * h0 / (1 + alpha * alpha)).epsilon(1e-14));
}

TEST_CASE("llg_rhs solves the implicit Gilbert equation")
{
    const Device d{DeviceParams{}};
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n;
    for (int k = 0; k < 2000; ++k) {
        const Vec3 m = normalized(Vec3{n(gen), n(gen), n(gen)});
        const Vec3 h = Vec3{n(gen), n(gen), n(gen)} * 1e6;
        const Vec3 is = Vec3{n(gen), n(gen), n(gen)} * 1e-4;
        const Vec3 v = llg_rhs(m, h, is, d);
        const Vec3 ref = gilbert_implicit(m, h, is, d.gamma(), 0.075, d.stt_prefactor());
        CHECK(norm(v - ref) <= 1e-12 * norm(ref));
        CHECK(std::abs(dot(v, m)) <= 1e-12 * norm(v));
    }
}

TEST_CASE("stt prefactor is 1 / (q N_s)")
{
    const Device d{DeviceParams{}};
    const double volume = oracle::pi / 4 * 40e-9 * 70e-9 * 0.9e-9;
    const double ns = 1257.3e3 * volume / oracle::mu_b;
    CHECK(d.stt_prefactor() == doctest::Approx(1.0 / (oracle::q * ns)).epsilon(1e-13));
}

TEST_CASE("heun_step: on-axis fixed point and norm")
{
    DeviceParams cold;
    cold.temperature = 0.0;
    const Device d{cold};
    NormalStream rng(1);
    CHECK(heun_step({0, 0, -1}, 0.0, 1e-12, d, rng) == Vec3{0, 0, -1});

    const Device hot{DeviceParams{}};
    const HeunIntegrator integ(hot, 1e-12);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    double worst = 0.0;
    for (int chain = 0; chain < 10; ++chain) {
        Vec3 m = normalized(rng.next_vec3());
        const double v = u(gen);
        for (int k = 0; k < 10000; ++k) {
            m = integ.step(m, v, rng);
            worst = std::max(worst, std::abs(1.0 - norm(m)));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("small-angle precession frequency matches the biaxial Kittel formula")
{
    const Device d(lossless(), Device::Conservative{});
    const double ms = 1257.3e3;
    const auto n = d.demag();
    const double hk = 2.0 * 0.9267e-3 / (oracle::mu0 * ms * 0.9e-9);
    const double kx = ms * n.nx, ky = ms * n.ny, kz = ms * n.nz - hk;
    const double gamma = 2.0 * oracle::mu_b * oracle::mu0 / oracle::hbar;
    const double omega = gamma * std::sqrt((kx - kz) * (ky - kz));

    const double dt = 0.05e-12;
    const HeunIntegrator integ(d, dt);
    Vec3 m = from_spherical(oracle::pi - 0.2 * oracle::pi / 180, 0.0);
    double prev = m.x;
    std::vector<double> crossings;
    for (int k = 1; k < 400000 && crossings.size() < 21; ++k) {
        m = integ.step_with_field(m, 0.0, {});
        if (prev > 0.0 && m.x <= 0.0) {
            const double frac = prev / (prev - m.x);
            crossings.push_back((k - 1 + frac) * dt);
        }
        prev = m.x;
    }
    REQUIRE(crossings.size() == 21);
    const double period = (crossings.back() - crossings.front()) / 20.0;
    CHECK(2.0 * oracle::pi / period == doctest::Approx(omega).epsilon(1e-4));
}

TEST_CASE("damped relaxation lowers the energy monotonically")
{
    DeviceParams cold;
    cold.temperature = 0.0;
    const Device d{cold};
    const HeunIntegrator integ(d, 1e-12);
    Vec3 m = from_spherical(oracle::pi - 10.0 * oracle::pi / 180, 0.3);
    double e = d.static_energy(m, 0.0);
    for (int k = 0; k < 5000; ++k) {
        m = integ.step_with_field(m, 0.0, {});
        const double next = d.static_energy(m, 0.0);
        CHECK(next <= e + 1e-12 * std::abs(e));
        e = next;
    }
    CHECK(m.z < -0.999);
}

TEST_CASE("conservative energy drift")
{
    const double tilt = 0.13;
    const double drift = conservative_energy_drift(DeviceParams{}, from_spherical(oracle::pi - tilt, 0.7), 0.0,
                                                   1e-12, 10000);
    CHECK(drift < 1e-4);
}

TEST_CASE("sample_initial")
{
    DeviceParams cold;
    cold.temperature = 0.0;
    const Device dc{cold};
    const SolverConfig cfg;
    NormalStream r0(3);
    CHECK(sample_initial(dc, cfg, r0) == Vec3{0, 0, -1});

    const Device d{DeviceParams{}};
    NormalStream a(17), b(17);
    const Vec3 ma = sample_initial(d, cfg, a);
    const Vec3 mb = sample_initial(d, cfg, b);
    CHECK(ma == mb);
    CHECK(ma.z < -0.9);
}

TEST_CASE("simulate: trajectory invariants and replay")
{
    const Device d{DeviceParams{}};
    SolverConfig cfg;
    cfg.t_init = 1e-9;
    cfg.t_relax = 1e-9;
    const Waveform w = vcma_pulse(0.7, 1.8e-9);
    const Trajectory t1 = simulate(w, d, cfg, 2024, 5);
    const Trajectory t2 = simulate(w, d, cfg, 2024, 5);
    REQUIRE(t1.samples.size() > 10);
    REQUIRE(t1.samples.size() == t2.samples.size());
    for (std::size_t k = 0; k < t1.samples.size(); ++k) {
        CHECK(t1.samples[k].m == t2.samples[k].m);
        CHECK(std::abs(1.0 - norm(t1.samples[k].m)) < 1e-9);
        if (k > 0) CHECK(t1.samples[k].t > t1.samples[k - 1].t);
    }
    CHECK(t1.switched == t2.switched);
    CHECK(t1.switched == (t1.final_state.z > 0.0));
    CHECK(t1.switched == simulate_switch(w, d, cfg, 2024, 5));
    CHECK_THROWS_AS(simulate(Waveform({{0.7, -1e-9}, {0.7, 2e-9}}), d, cfg, 1, 0), InvalidParameter);

    SolverConfig bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    bad = cfg;
    bad.record_stride = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("zero waveform never switches: barrier and ensemble")
{
    const Device d{DeviceParams{}};
    const double ms = 1257.3e3;
    const auto n = d.demag();
    const double hk = 2.0 * 0.9267e-3 / (oracle::mu0 * ms * 0.9e-9);
    const double kz = ms * n.nz - hk;
    const double volume = oracle::pi / 4 * 40e-9 * 70e-9 * 0.9e-9;
    // Lowest saddle is along the long axis y.
    const double barrier = 0.5 * oracle::mu0 * ms * volume * (ms * n.ny - kz);
    CHECK(barrier / (oracle::kb * 300.0) > 40.0);

    SolverConfig cfg;
    cfg.t_init = 1e-9;
    cfg.t_relax = 1e-9;
    const auto e = estimate_probability(vcma_pulse(0.0, 1e-9), d, cfg, 1000, 77, 1);
    CHECK(e.n_switched == 0);
    CHECK(e.p == 0.0);
}

TEST_CASE("equilibrium m_z follows the Boltzmann distribution")
{
    const Device d{DeviceParams{}};
    const double ms = 1257.3e3;
    const auto n = d.demag();
    const double hk = 2.0 * 0.9267e-3 / (oracle::mu0 * ms * 0.9e-9);
    const double volume = oracle::pi / 4 * 40e-9 * 70e-9 * 0.9e-9;
    oracle::BoltzmannMz cdf{oracle::mu0 * ms * volume / (2.0 * oracle::kb * 300.0), ms * n.nx, ms * n.ny,
                            ms * n.nz - hk};
    cdf.tabulate();

    const double dt = 1e-12;
    const HeunIntegrator integ(d, dt);
    std::vector<double> samples;
    const int chains = 50, per_chain = 100;
    for (int c = 0; c < chains; ++c) {
        NormalStream rng(derive_seed(31337, static_cast<std::uint64_t>(c)));
        Vec3 m{0, 0, -1};
        for (int k = 0; k < 3000; ++k) m = integ.step(m, 0.0, rng);
        for (int s = 0; s < per_chain; ++s) {
            for (int k = 0; k < 2000; ++k) m = integ.step(m, 0.0, rng);
            samples.push_back(m.z);
        }
    }
    const double ks = oracle::ks_statistic(samples, cdf);
    CHECK(ks < oracle::ks_critical_1pct(samples.size()));
}
