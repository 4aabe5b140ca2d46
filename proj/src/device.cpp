#include "vcma/device.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "vcma/constants.hpp"
#include "vcma/errors.hpp"

namespace vcma {

namespace {

using constants::pi;

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr std::array<double, 8> kGlNodes{0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                         0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                         0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlWeights{0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                           0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                           0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss_legendre(F&& f, double lo, double hi)
{
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
        sum += kGlWeights[i] * (f(mid + half * kGlNodes[i]) + f(mid - half * kGlNodes[i]));
    }
    return sum * half;
}

// Airy-type form factor (2 J1(q) / q)^2 of a unit disc.
double disc_form_factor(double q)
{
    if (q < 1e-6) {
        return 1.0 - q * q / 4.0;
    }
    const double j = 2.0 * std::cyl_bessel_j(1.0, q) / q;
    return j * j;
}

// int_0^inf (2 J1(q)/q)^2 (1 - exp(-q s)) dq for s = f t > 0.
double thickness_kernel(double s)
{
    // Panels of width pi/2 keep every panel on a smooth stretch of J1.
    const double panel = 0.5 * pi;
    const double q_max = std::max(60.0 / s, 400.0);
    double sum = 0.0;
    for (double lo = 0.0; lo < q_max; lo += panel) {
        sum += gauss_legendre([s](double q) { return disc_form_factor(q) * -std::expm1(-q * s); }, lo, lo + panel);
    }
    // Asymptotic tail: <(2J1/q)^2> ~ 4/(pi q^3) once exp(-q s) is negligible.
    const double q_end = std::ceil(q_max / panel) * panel;
    sum += 2.0 / (pi * q_end * q_end);
    return sum;
}

} // namespace

DemagFactors elliptical_cylinder_demag(double width, double length, double thickness)
{
    if (!(width > 0.0) || !(length > 0.0) || !(thickness > 0.0)) {
        throw InvalidParameter("demag: geometry dimensions must be positive");
    }
    const double a = 0.5 * width;
    const double b = 0.5 * length;
    const double t = thickness;

    // N_z = 1/(4 pi t) int dpsi I(psi) / f(psi),
    // N_x = 1/(4 pi t) int dpsi w_x(psi) (2 t - I(psi) / f(psi)),
    // with f^2 = cos^2/a^2 + sin^2/b^2 and I the thickness kernel at s = f t.
    // The integrand is smooth and periodic in psi; the trapezoid rule on one
    // quadrant converges geometrically.
    constexpr int kAngles = 48;
    double nz_sum = 0.0;
    double nx_sum = 0.0;
    for (int k = 0; k < kAngles; ++k) {
        const double psi = (k + 0.5) * (0.5 * pi / kAngles);
        const double c2 = std::cos(psi) * std::cos(psi) / (a * a);
        const double s2 = std::sin(psi) * std::sin(psi) / (b * b);
        const double f = std::sqrt(c2 + s2);
        const double iz = thickness_kernel(f * t) / f;
        nz_sum += iz;
        nx_sum += (c2 / (c2 + s2)) * (2.0 * t - iz);
    }
    const double dpsi = 2.0 * pi / (4 * kAngles); // quadrant samples stand in for the full circle
    DemagFactors n;
    n.nz = nz_sum * 4.0 * dpsi / (4.0 * pi * t);
    n.nx = nx_sum * 4.0 * dpsi / (4.0 * pi * t);
    n.ny = 1.0 - n.nz - n.nx;
    return n;
}

DemagFactors geometry_demag(double width, double length, double thickness)
{
    static std::mutex mutex;
    static std::map<std::array<double, 3>, DemagFactors> cache{{{40e-9, 70e-9, 0.9e-9}, kTableIDemag}};
    const std::array<double, 3> key{width, length, thickness};
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (const auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    const DemagFactors n = elliptical_cylinder_demag(width, length, thickness);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, n);
    return n;
}

void DeviceParams::validate(bool allow_zero_damping) const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw InvalidParameter(std::string("device parameter out of range: ") + what);
        }
    };
    require(width > 0.0, "width must be > 0");
    require(length > 0.0, "length must be > 0");
    require(free_thickness > 0.0, "free_thickness must be > 0");
    require(oxide_thickness > 0.0, "oxide_thickness must be > 0");
    require(saturation_magnetization > 0.0, "saturation_magnetization must be > 0");
    require((damping > 0.0 || (allow_zero_damping && damping == 0.0)) && damping < 1.0,
            "damping must lie in (0, 1)");
    require(temperature >= 0.0, "temperature must be >= 0");
    require(vcma_coefficient > 0.0, "vcma_coefficient must be > 0");
    require(interface_anisotropy > 0.0, "interface_anisotropy must be > 0");
    require(polarization > 0.0 && polarization < 1.0, "polarization must lie in (0, 1)");
    require(r_parallel > 0.0, "r_parallel must be > 0");
    require(r_antiparallel > r_parallel, "r_antiparallel must exceed r_parallel");
    require(std::abs(norm(pinned) - 1.0) <= 1e-12, "pinned direction must be a unit vector");
    if (demag) {
        require(demag->nx >= 0.0 && demag->ny >= 0.0 && demag->nz >= 0.0, "demag factors must be >= 0");
        require(std::abs(demag->trace() - 1.0) <= 1e-9, "demag factors must sum to 1");
    }
}

double DeviceParams::volume() const { return 0.25 * constants::pi * width * length * free_thickness; }

double DeviceParams::spin_count() const { return saturation_magnetization * volume() / constants::bohr_magneton; }

double DeviceParams::gyromagnetic_ratio() const
{
    return 2.0 * constants::bohr_magneton * constants::mu0 / constants::hbar;
}

double DeviceParams::interface_anisotropy_field() const
{
    return 2.0 * interface_anisotropy / (constants::mu0 * saturation_magnetization * free_thickness);
}

double DeviceParams::anisotropy_null_voltage() const
{
    return interface_anisotropy * oxide_thickness / vcma_coefficient;
}

Device::Device(DeviceParams params) : Device(std::move(params), Conservative{})
{
    params_.validate();
}

Device::Device(DeviceParams params, Conservative) : params_(std::move(params))
{
    params_.validate(true);
    demag_ = params_.demag ? *params_.demag
                           : geometry_demag(params_.width, params_.length, params_.free_thickness);
    params_.demag = demag_;
    gamma_ = params_.gyromagnetic_ratio();
    volume_ = params_.volume();
    spin_count_ = params_.spin_count();
    stt_prefactor_ = 1.0 / (constants::elementary_charge * spin_count_);
    anisotropy_field0_ = params_.interface_anisotropy_field();
    anisotropy_slope_ = anisotropy_field0_ / params_.anisotropy_null_voltage();
    const double ms = params_.saturation_magnetization;
    demag_x_ = ms * demag_.nx;
    demag_y_ = ms * demag_.ny;
    demag_z_ = ms * demag_.nz;
    g_parallel_ = 1.0 / params_.r_parallel;
    g_antiparallel_ = 1.0 / params_.r_antiparallel;
}

double Device::thermal_sigma(double dt) const
{
    if (!(dt > 0.0)) {
        throw InvalidParameter("thermal field: time step must be > 0");
    }
    const double a = params_.damping;
    const double ms = params_.saturation_magnetization;
    return std::sqrt(a / (1.0 + a * a) * 2.0 * constants::boltzmann * params_.temperature
                     / (gamma_ * constants::mu0 * ms * volume_ * dt));
}

double Device::static_energy(const Vec3& m, double voltage) const
{
    const Vec3 h = static_field(m, voltage);
    return -0.5 * constants::mu0 * params_.saturation_magnetization * volume_ * dot(m, h);
}

DemagFactors demag_factors(const DeviceParams& params) { return Device(params).demag(); }

Vec3 demag_field(const Vec3& m, const Device& device) { return device.demag_field(m); }

Vec3 anisotropy_field(const Vec3& m, double voltage, const Device& device)
{
    return device.anisotropy_field(m, voltage);
}

Vec3 thermal_field(const Device& device, double dt, const Vec3& g) { return g * device.thermal_sigma(dt); }

double resistance(const Vec3& m, const Device& device) { return device.resistance(m); }

Vec3 spin_current(double voltage, const Vec3& m, const Device& device) { return device.spin_current(voltage, m); }

} // namespace vcma
