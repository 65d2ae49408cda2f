#pragma once

// Radial and cylindrical discretization: trapezoidal quadrature for
// integrals over R^d of radial functions, a second-order radial Laplacian,
// discrete norms, cubic interpolation and exponential-tail fits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace concnls {

/// Surface area of the unit sphere S^{d-1}.
inline double unit_sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

struct RadialGrid {
    int d = 3;
    std::vector<double> nodes;   // r_0 = 0 < r_1 < ... < r_n = r_max
    std::vector<double> weights; // w_i ~ |S^{d-1}| r_i^{d-1} dr (trapezoid)

    double r_max() const { return nodes.back(); }
    double spacing() const { return nodes[1] - nodes[0]; }
    std::size_t size() const { return nodes.size(); }
};

inline std::shared_ptr<const RadialGrid> make_uniform_grid(int d, double r_max, std::size_t n) {
    if (n < 3) throw std::invalid_argument("grid: need at least 3 intervals");
    if (!(r_max > 0.0)) throw std::invalid_argument("grid: r_max must be positive");
    auto g = std::make_shared<RadialGrid>();
    g->d = d;
    g->nodes.resize(n + 1);
    g->weights.resize(n + 1);
    const double h = r_max / static_cast<double>(n);
    const double area = unit_sphere_area(d);
    for (std::size_t i = 0; i <= n; ++i) {
        const double r = h * static_cast<double>(i);
        g->nodes[i] = r;
        double w = area * std::pow(r, d - 1) * h;
        if (i == 0 || i == n) w *= 0.5;
        g->weights[i] = w;
    }
    return g;
}

struct RadialProfile {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> values;

    RadialProfile() = default;
    RadialProfile(std::shared_ptr<const RadialGrid> g, std::vector<double> v)
        : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid->size())
            throw std::invalid_argument("profile: size mismatch with grid");
    }

    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }

    /// Cubic Hermite interpolation with fourth-order slopes (uniform grid);
    /// zero beyond r_max, even extension across the origin.
    double at(double r) const { return interp(r, false); }

    /// Derivative of the interpolant.
    double deriv_at(double r) const { return interp(r, true); }

  private:
    double interp(double r, bool want_deriv) const {
        r = std::abs(r);
        const auto& x = grid->nodes;
        const std::size_t n = x.size();
        const double h = grid->spacing();
        if (r >= x.back()) return 0.0;
        std::size_t i = static_cast<std::size_t>(r / h);
        if (i >= n - 1) i = n - 2;
        const double t = (r - x[i]) / h;
        const double y0 = values[i], y1 = values[i + 1];
        const double m0 = slope(i), m1 = slope(i + 1);
        const double t2 = t * t, t3 = t2 * t;
        if (!want_deriv) {
            return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0
                 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
        }
        return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * m0
              + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * m1) / h;
    }

    // centered fourth-order slope; even symmetry at the origin, one-sided at r_max
    double slope(std::size_t i) const {
        const double h = grid->spacing();
        const std::size_t n = values.size();
        auto v = [&](long k) -> double {
            if (k < 0) return values[static_cast<std::size_t>(-k)]; // u(-r) = u(r)
            if (k >= static_cast<long>(n)) return 0.0;
            return values[static_cast<std::size_t>(k)];
        };
        const long j = static_cast<long>(i);
        if (i >= 2 && i + 2 < n)
            return (-v(j + 2) + 8 * v(j + 1) - 8 * v(j - 1) + v(j - 2)) / (12 * h);
        if (i == 0) return 0.0; // radial regularity
        return (v(j + 1) - v(j - 1)) / (2 * h);
    }
};

/// Sum_i w_i f(u_i).
template <class F>
double integrate(const RadialProfile& u, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u.grid->weights[i] * f(u.values[i]);
    return s;
}

/// Quadrature of a function of the radius alone.
template <class F>
double integrate_radial(const RadialGrid& g, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * f(g.nodes[i]);
    return s;
}

struct NormSet {
    double l2_sq = 0.0;
    double grad_l2_sq = 0.0;
};

/// ||grad u||_2^2 by midpoint differences: sum |S^{d-1}| r_{i+1/2}^{d-1} h ((u_{i+1}-u_i)/h)^2.
inline double grad_norm_sq(const RadialProfile& u) {
    const auto& g = *u.grid;
    const double h = g.spacing();
    const double area = unit_sphere_area(g.d);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double rm = 0.5 * (g.nodes[i] + g.nodes[i + 1]);
        const double du = (u.values[i + 1] - u.values[i]) / h;
        s += area * std::pow(rm, g.d - 1) * h * du * du;
    }
    return s;
}

inline NormSet norms(const RadialProfile& u) {
    NormSet n;
    n.l2_sq = integrate(u, [](double v) { return v * v; });
    n.grad_l2_sq = grad_norm_sq(u);
    return n;
}

inline double lp_norm_pow(const RadialProfile& u, double p) {
    return integrate(u, [p](double v) { return std::pow(std::abs(v), p); });
}

/// Second-order discrete Laplacian u'' + (d-1)/r u' on the nodes.
/// At the origin the radial regularity u'(0) = 0 gives Delta u(0) = d u''(0),
/// evaluated with the symmetric ghost u(-h) = u(h).  The last node uses a
/// one-sided copy of its neighbour (profiles are expected to have decayed).
inline RadialProfile radial_laplacian(const RadialProfile& u) {
    const auto& g = *u.grid;
    const std::size_t n = g.size();
    if (n < 3) throw std::invalid_argument("radial_laplacian: need >= 3 nodes");
    const double h = g.spacing();
    std::vector<double> out(n, 0.0);
    out[0] = g.d * 2.0 * (u.values[1] - u.values[0]) / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double upp = (u.values[i + 1] - 2.0 * u.values[i] + u.values[i - 1]) / (h * h);
        const double up = (u.values[i + 1] - u.values[i - 1]) / (2.0 * h);
        out[i] = upp + (g.d - 1) / g.nodes[i] * up;
    }
    out[n - 1] = out[n - 2];
    return RadialProfile(u.grid, std::move(out));
}

/// Stiffness action A u with <u, A u> = grad_norm_sq(u) exactly (same midpoint
/// fluxes).  This is the energy-consistent form used by gradient flows;
/// (A u)_i / w_i approximates -Delta u at the nodes to O(h^2).
inline std::vector<double> stiffness_apply(const RadialProfile& u) {
    const auto& g = *u.grid;
    const std::size_t n = g.size();
    const double h = g.spacing();
    const double area = unit_sphere_area(g.d);
    std::vector<double> out(n, 0.0);
    double flux_prev = 0.0; // s_{i-1/2} (u_i - u_{i-1})/h
    for (std::size_t i = 0; i < n; ++i) {
        double flux_next = 0.0;
        if (i + 1 < n) {
            const double rm = 0.5 * (g.nodes[i] + g.nodes[i + 1]);
            flux_next = area * std::pow(rm, g.d - 1) * (u.values[i + 1] - u.values[i]) / h;
        }
        out[i] = flux_prev - flux_next;
        flux_prev = flux_next;
    }
    return out;
}

struct TailFit {
    double rate = 0.0;      // kappa in u ~ A r^{-power} e^{-kappa r}
    double power = 0.0;
    double amplitude = 0.0; // A
};

/// Least-squares fit of log u = log A - rate * r - power * log r on [ra, rb].
inline TailFit fit_exponential_tail(const RadialProfile& u, double ra, double rb) {
    const auto& g = *u.grid;
    // 3x3 normal equations for coefficients (log A, rate, power)
    double M[3][3] = {{0}}, rhs[3] = {0};
    std::size_t used = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.nodes[i];
        if (r < ra || r > rb) continue;
        if (!(u.values[i] > 0.0))
            throw std::domain_error("fit_exponential_tail: non-positive value in window");
        const double basis[3] = {1.0, -r, -std::log(r)};
        const double y = std::log(u.values[i]);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) M[a][b] += basis[a] * basis[b];
            rhs[a] += basis[a] * y;
        }
        ++used;
    }
    if (used < 4) throw std::invalid_argument("fit_exponential_tail: window too small");
    // Gaussian elimination with partial pivoting
    int piv[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int best = c;
        for (int k = c + 1; k < 3; ++k)
            if (std::abs(M[piv[k]][c]) > std::abs(M[piv[best]][c])) best = k;
        std::swap(piv[c], piv[best]);
        for (int k = c + 1; k < 3; ++k) {
            const double f = M[piv[k]][c] / M[piv[c]][c];
            for (int b = c; b < 3; ++b) M[piv[k]][b] -= f * M[piv[c]][b];
            rhs[piv[k]] -= f * rhs[piv[c]];
        }
    }
    double sol[3];
    for (int c = 2; c >= 0; --c) {
        double s = rhs[piv[c]];
        for (int b = c + 1; b < 3; ++b) s -= M[piv[c]][b] * sol[b];
        sol[c] = s / M[piv[c]][c];
    }
    TailFit f;
    f.amplitude = std::exp(sol[0]);
    f.rate = sol[1];
    f.power = sol[2];
    return f;
}

/// Interpolates a profile onto another grid (zero beyond its support).
inline RadialProfile resample_profile(const RadialProfile& u,
                                      std::shared_ptr<const RadialGrid> target) {
    std::vector<double> v(target->size());
    for (std::size_t i = 0; i < target->size(); ++i) v[i] = u.at(target->nodes[i]);
    return RadialProfile(std::move(target), std::move(v));
}

/// Discrete H^1 distance of two profiles, evaluated on the first one's grid.
inline double h1_distance(const RadialProfile& a, const RadialProfile& b) {
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        diff[i] = a.values[i] - b.at(a.grid->nodes[i]);
    RadialProfile d(a.grid, std::move(diff));
    const auto n = norms(d);
    return std::sqrt(n.l2_sq + n.grad_l2_sq);
}

// ---- cylindrical grid for two-center integrals -----------------------------

/// Axially symmetric tensor grid: axis coordinate zeta (signed) times
/// transverse radius s >= 0, weights 2 pi s ds dz (trapezoid ends halved).
struct CylGrid {
    std::vector<double> axis;       // zeta_j
    std::vector<double> transverse; // s_k
    double dz = 0.0, ds = 0.0;

    /// Integral over R^3 of an axially symmetric f(zeta, s).
    template <class F>
    double integrate(F&& f) const {
        double total = 0.0;
        for (std::size_t j = 0; j < axis.size(); ++j) {
            const double wz = (j == 0 || j + 1 == axis.size()) ? 0.5 * dz : dz;
            double row = 0.0;
            for (std::size_t k = 0; k < transverse.size(); ++k) {
                const double s = transverse[k];
                double ws = (k == 0 || k + 1 == transverse.size()) ? 0.5 * ds : ds;
                row += 2.0 * M_PI * s * ws * f(axis[j], s);
            }
            total += wz * row;
        }
        return total;
    }
};

inline CylGrid make_cyl_grid(double z_extent, double s_extent, std::size_t nz, std::size_t ns) {
    if (nz < 4 || ns < 4) throw std::invalid_argument("cyl grid: too few nodes");
    CylGrid g;
    g.dz = 2.0 * z_extent / static_cast<double>(nz);
    g.ds = s_extent / static_cast<double>(ns);
    g.axis.resize(nz + 1);
    g.transverse.resize(ns + 1);
    for (std::size_t j = 0; j <= nz; ++j) g.axis[j] = -z_extent + g.dz * static_cast<double>(j);
    for (std::size_t k = 0; k <= ns; ++k) g.transverse[k] = g.ds * static_cast<double>(k);
    return g;
}

// ---- export ----------------------------------------------------------------

inline void profile_to_csv(const RadialProfile& u, std::ostream& os) {
    os << "r,u\n";
    for (std::size_t i = 0; i < u.size(); ++i)
        os << u.grid->nodes[i] << "," << u.values[i] << "\n";
}

inline nlohmann::json grid_to_json(const RadialGrid& g) {
    return nlohmann::json{{"d", g.d},
                          {"r_max", g.r_max()},
                          {"n", g.size() - 1},
                          {"scheme", "uniform"}};
}

} // namespace concnls
