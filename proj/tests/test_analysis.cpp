#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "vcma/analysis.hpp"
#include "vcma/errors.hpp"

using namespace vcma;

TEST_CASE("C2 metric")
{
    const std::vector<double> two{0.4, 0.4 + oracle::pi};
    CHECK(bimodal_concentration(two) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> four{0.1, 0.1 + oracle::pi / 2, 0.1 + oracle::pi, 0.1 + 1.5 * oracle::pi};
    CHECK(bimodal_concentration(four) < 1e-15);

    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-oracle::pi, oracle::pi);
    std::vector<double> a(500);
    for (auto& x : a) x = u(gen);
    for (double shift : {0.3, 1.7, -2.5}) {
        std::vector<double> b = a;
        for (auto& x : b) x += shift;
        CHECK(std::abs(bimodal_concentration(a) - bimodal_concentration(b)) < 1e-12);
    }
    const double c = bimodal_concentration(a);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
}

TEST_CASE("field components near the pole")
{
    const Device d{DeviceParams{}};
    for (double u : {0.0, 0.7, 0.8}) {
        const auto h = field_components({0, 0, -1}, u, d);
        CHECK(h.hx == 0.0);
        CHECK(h.hy == 0.0);
    }
    for (double phi = -3.0; phi < 3.2; phi += 0.25) {
        const auto h = field_components(from_spherical(oracle::pi - 0.05, phi), 0.0, d);
        CHECK(std::abs(h.hz) > 10.0 * std::abs(h.hx));
        CHECK(std::abs(h.hz) > 10.0 * std::abs(h.hy));
    }
}

TEST_CASE("zero-bias ordering puts H_z on top everywhere")
{
    const Device d{DeviceParams{}};
    const auto v = ordering_in_cap(0.0, d, 0.5, 72);
    CHECK(v.majority[2] == Axis::z);
    CHECK(v.agreement == 1.0);
    CHECK(v.points > 0);
}

TEST_CASE("velocity map: tangency, pole fixed point and agreement with llg_rhs")
{
    const Device d{DeviceParams{}};
    for (double u : {0.0, 0.7, 0.8}) {
        for (const auto& s : velocity_field_map(u, d, 12, {0.0, true, true})) {
            CHECK(std::abs(dot(s.velocity, s.m)) <= 1e-12 * norm(s.velocity));
            const Vec3 ref =
                llg_rhs(s.m, d.static_field(s.m, u), d.spin_current(u, s.m), d);
            CHECK(norm(s.velocity - ref) <= 1e-12 * norm(ref));
            const Vec3 sum = s.precession_x + s.precession_y + s.precession_z;
            const Vec3 full = -d.gamma() * cross(s.m, d.static_field(s.m, u));
            CHECK(norm(sum - full) <= 1e-12 * norm(full));
        }
        const Vec3 pole{0, 0, -1};
        const auto h = field_components(pole, u, d);
        CHECK(norm(llg_rhs(pole, {h.hx, h.hy, h.hz}, {}, d)) == 0.0);
    }
    CHECK_THROWS_AS(velocity_field_map(0.7, d, 7), InvalidParameter);
}

TEST_CASE("0.7 V cap map has two antipodal exit sectors")
{
    const Device d{DeviceParams{}};
    const int n = 24;
    const auto map = velocity_field_map(0.7, d, n, {0.2, false, false});
    // Innermost ring (closest to the pole) is the last block of 2n samples.
    std::vector<int> outward;
    for (std::size_t k = map.size() - 2 * n; k < map.size(); ++k) {
        const auto& s = map[k];
        const Vec3 e_theta{std::cos(s.theta) * std::cos(s.phi), std::cos(s.theta) * std::sin(s.phi),
                           -std::sin(s.theta)};
        outward.push_back(dot(s.velocity, e_theta) < 0.0);
    }
    int transitions = 0;
    for (int j = 0; j < 2 * n; ++j) transitions += outward[j] != outward[(j + 1) % (2 * n)];
    CHECK(transitions == 4);
    for (int j = 0; j < n; ++j) CHECK(outward[j] == outward[j + n]);
    CHECK(std::accumulate(outward.begin(), outward.end(), 0) > 0);
}

TEST_CASE("exit histogram bookkeeping")
{
    const Device d{DeviceParams{}};
    SolverConfig cfg;
    cfg.t_init = 1e-9;
    ExitOptions opt;
    opt.window = 3e-9;
    const auto h1 = exit_histogram(0.7, d, cfg, 100, 11, opt, 1);
    const auto h2 = exit_histogram(0.7, d, cfg, 100, 11, opt, 3);
    CHECK(h1.exited + h1.never_exited == 100);
    CHECK(std::accumulate(h1.counts.begin(), h1.counts.end(), std::uint64_t{0}) == h1.exited);
    CHECK(h1.exit_azimuths.size() == h1.exited);
    CHECK(h1.counts.size() == 36);
    CHECK(h1.counts == h2.counts);
    CHECK(h1.concentration == h2.concentration);
    CHECK(h1.concentration == doctest::Approx(bimodal_concentration(h1.exit_azimuths)).epsilon(1e-15));

    const auto h0 = exit_histogram(0.0, d, cfg, 100, 11, opt, 1);
    CHECK(h0.exited == 0);
    CHECK(h0.never_exited == 100);
}
