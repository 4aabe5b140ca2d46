#pragma once

// Independent reference computations used by the tests. None of these share
// code with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace oracle {

constexpr double pi = 3.14159265358979323846;

// CODATA 2018, typed in separately from the library's constants header.
constexpr double mu0 = 1.25663706212e-6;
constexpr double mu_b = 9.2740100783e-24;
constexpr double hbar = 1.054571817e-34;
constexpr double kb = 1.380649e-23;
constexpr double q = 1.602176634e-19;

struct Demag {
    double nx, ny, nz;
};

// Overlap area of two unit discs whose centres are u apart.
inline double disc_overlap(double u)
{
    if (u >= 2.0) return 0.0;
    return 2.0 * std::acos(u / 2.0) - 0.5 * u * std::sqrt(4.0 - u * u);
}

// Real-space surface-charge demag of an elliptical cylinder with semi-axes
// a (x), b (y) and thickness t.
// Nz: top/bottom face charges through the ellipse autocorrelation area.
// Nx, Ny: side-wall charges, with the z double integral done in closed form.
inline Demag elliptical_cylinder(double a, double b, double t)
{
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::tanh_sinh;

    auto f_of = [&](double psi) {
        return std::sqrt(std::pow(std::cos(psi) / a, 2) + std::pow(std::sin(psi) / b, 2));
    };
    auto radial = [&](double psi) {
        const double f = f_of(psi);
        const double ft = f * t;
        auto g = [ft](double u) { return (1.0 - u / std::sqrt(u * u + ft * ft)) * disc_overlap(u); };
        const double knee = std::min(20.0 * ft, 1.0);
        const double i1 = gauss_kronrod<double, 61>::integrate(g, 0.0, knee, 20, 1e-13);
        const double i2 = gauss_kronrod<double, 61>::integrate(g, knee, 2.0, 20, 1e-13);
        return (i1 + i2) / f;
    };
    const double quarter = gauss_kronrod<double, 61>::integrate(radial, 0.0, pi / 2, 15, 1e-12);
    const double nz = 4.0 * quarter / (2.0 * pi * pi * t);

    // Side walls: F(d) = int_0^t int_0^t dz dz' / sqrt(d^2 + (z - z')^2).
    auto F = [t](double d) { return 2.0 * (t * std::asinh(t / d) - std::sqrt(t * t + d * d) + d); };
    auto side = [&](bool x_axis) {
        tanh_sinh<double> ts;
        const int n_outer = 256;
        double total = 0.0;
        for (int i = 0; i < n_outer; ++i) {
            const double phi = 2.0 * pi * (i + 0.5) / n_outer;
            const double wp = x_axis ? b * std::cos(phi) : a * std::sin(phi);
            auto inner = [&](double delta) {
                const double phi2 = phi + delta;
                const double mid = phi + 0.5 * delta;
                const double d = 2.0 * std::abs(std::sin(0.5 * delta)) *
                                 std::hypot(a * std::sin(mid), b * std::cos(mid));
                if (d == 0.0) return 0.0;
                const double w2 = x_axis ? b * std::cos(phi2) : a * std::sin(phi2);
                return wp * w2 * F(d);
            };
            const double edge = 0.3;
            const double s = ts.integrate(inner, 0.0, edge) + ts.integrate(inner, edge, 2.0 * pi - edge) +
                             ts.integrate(inner, 2.0 * pi - edge, 2.0 * pi);
            total += s;
        }
        total *= 2.0 * pi / n_outer;
        const double volume = pi * a * b * t;
        return total / (4.0 * pi * volume);
    };
    return {side(true), side(false), nz};
}

// Dense Gaussian elimination with partial pivoting on the full (R+C)-node
// system, driven rows replaced by identity rows.
inline std::vector<double> nodal(std::size_t rows, std::size_t cols, const std::vector<double>& g, std::size_t dr,
                                 std::size_t dc, double u)
{
    const std::size_t n = rows + cols;
    std::vector<double> A(n * n, 0.0), rhs(n, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return A[i * n + j]; };
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double c = g[i * cols + j];
            at(i, i) += c;
            at(rows + j, rows + j) += c;
            at(i, rows + j) -= c;
            at(rows + j, i) -= c;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (k == dr || k == rows + dc) {
            for (std::size_t j = 0; j < n; ++j) at(k, j) = 0.0;
            at(k, k) = 1.0;
            rhs[k] = k == dr ? u : 0.0;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
        for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
        std::swap(rhs[k], rhs[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = at(i, k) / at(k, k);
            for (std::size_t j = k; j < n; ++j) at(i, j) -= f * at(k, j);
            rhs[i] -= f * rhs[k];
        }
    }
    std::vector<double> v(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= at(k, j) * v[j];
        v[k] = s / at(k, k);
    }
    return v;
}

// Equilibrium density of m_z in the southern well of the biaxial energy
// E = (mu0 Ms V / 2)(kx mx^2 + ky my^2 + kz mz^2), azimuth integrated out.
struct BoltzmannMz {
    double beta_c; // mu0 Ms V / (2 kT)
    double kx, ky, kz;

    BoltzmannMz(double beta_c_, double kx_, double ky_, double kz_) : beta_c(beta_c_), kx(kx_), ky(ky_), kz(kz_) {}

    double density(double mz) const
    {
        const double s = 1.0 - mz * mz;
        const double e = 0.5 * (kx + ky) * s + kz * mz * mz;
        const double emin = kz; // at the pole
        return std::exp(-beta_c * (e - emin)) * boost::math::cyl_bessel_i(0, beta_c * 0.5 * (kx - ky) * s);
    }

    // Tabulated CDF on [-1, 0].
    std::vector<double> grid, cdf;

    void tabulate(int n = 200000)
    {
        grid.resize(n + 1);
        cdf.assign(n + 1, 0.0);
        for (int i = 0; i <= n; ++i) grid[i] = -1.0 + static_cast<double>(i) / n;
        for (int i = 1; i <= n; ++i) {
            const double h = grid[i] - grid[i - 1];
            const double m = 0.5 * (grid[i] + grid[i - 1]);
            cdf[i] = cdf[i - 1] + h * (density(grid[i - 1]) + 4.0 * density(m) + density(grid[i])) / 6.0;
        }
        for (auto& c : cdf) c /= cdf.back();
    }

    double operator()(double mz) const
    {
        if (mz <= -1.0) return 0.0;
        if (mz >= 0.0) return 1.0;
        const auto it = std::upper_bound(grid.begin(), grid.end(), mz);
        const std::size_t i = static_cast<std::size_t>(it - grid.begin());
        const double w = (mz - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
    }
};

// One-sample Kolmogorov-Smirnov statistic; sorts `x`.
template <class Cdf>
double ks_statistic(std::vector<double> x, const Cdf& cdf)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

// Asymptotic one-sample KS critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

} // namespace oracle
