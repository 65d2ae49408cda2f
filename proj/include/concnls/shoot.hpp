#pragma once

// Radial shooting solver for semilinear ground states -Delta u = g(u) in R^d:
// the mass-constrained Euler-Lagrange equation, the NLS limit profile, the
// zero-mass equation and the large-multiplier limit profile.  The solver
// bisects on the central height u(0) between trajectories that cross zero
// (height too large) and trajectories that turn back up or flatten (height
// too small), then samples the selected trajectory onto a uniform grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "concnls/errors.hpp"
#include "concnls/grid.hpp"
#include "concnls/model.hpp"
#include "concnls/parallel.hpp"

namespace concnls {

struct ShootOpts {
    double ode_tol = 1e-10;      // local error tolerance of the RK pair
    double height_tol = 1e-12;   // relative bisection tolerance on u(0)
    double r_max = 0.0;          // 0: automatic from the decay rate
    std::size_t n_nodes = 0;     // 0: automatic
    double height_lo = 0.0;      // 0: automatic bracket
    double height_hi = 0.0;
    double fixed_height = 0.0;   // >0: skip bisection (dilation-invariant case)
    int max_bisect = 200;
};

/// One equation -Delta u = g(u).  G is the antiderivative of g with G(0)=0,
/// and energy_density is the F with  E[u] = ||grad u||^2 + int F(u^2),
/// i.e. G(t) = -F(t^2)/2 - mu t^2/2.
struct RadialEquation {
    std::function<double(double)> g;
    std::function<double(double)> G;
    std::function<double(double)> energy_density;
    double mu = 0.0;            // linear part; decay rate sqrt(mu) when > 0
    bool algebraic_tail = false;
    double zeta0 = 0.0;         // smallest positive zero of G (height floor)
    double kink_height = 0.0;   // u-level where g is only C^1 (0: smooth)
    std::string name;
};

struct GroundState {
    RadialProfile profile;
    RadialProfile derivative;   // du/dr on the same grid
    double mu = 0.0;
    double lambda_mass = 0.0;   // ||u||_2^2 (tail-corrected; truncated if algebraic)
    double grad_sq = 0.0;       // ||grad u||_2^2 from the sampled derivative
    double energy = 0.0;        // ||grad u||^2 + int F_eq(u^2)
    double pohozaev_residual = 0.0;
    TailFit decay;
    double shoot_height = 0.0;
    int bisection_steps = 0;
    double pde_residual = 0.0;  // sampled-PDE max-norm residual relative to max |g(u)|
    double r_stop = 0.0;        // integration end; nodes beyond carry the fitted tail
};

// ---- equations -------------------------------------------------------------

namespace detail {

inline double zeta0_el(const ModelParams& p, double mu) {
    // smallest positive root of G_mu
    if (mu <= 0.0) return 0.0;
    if (mu <= 1.0) {
        const double z = std::pow(mu, 1.0 / (2.0 * (p.q - 1.0)));
        if (z <= 1.0) return z;
    }
    // on the upper branch: a + c t^{2r} - (b+mu) t^2 = 0, t >= 1
    auto f = [&](double t) {
        return p.a_const + p.c_const * std::pow(t, 2.0 * p.r) - (p.b_const + mu) * t * t;
    };
    double lo = 1.0, hi = 1.2;
    while (f(hi) < 0.0) { lo = hi; hi *= 1.2; }
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        (f(m) < 0.0 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

inline RadialEquation el_equation(const ModelParams& p, double mu) {
    RadialEquation eq;
    eq.g = [p, mu](double t) { return g_mu(p, mu, t); };
    eq.G = [p, mu](double t) { return big_g(p, mu, t); };
    eq.energy_density = [p](double s) { return f_alpha(p, s); };
    eq.mu = mu;
    eq.zeta0 = detail::zeta0_el(p, mu);
    eq.kink_height = std::sqrt(p.alpha);
    eq.name = "el";
    return eq;
}

/// NLS limit profile: -Delta v = -v + q v^{2q-1}.
inline RadialEquation nls_v0_equation(const ModelParams& p) {
    const double q = p.q;
    RadialEquation eq;
    eq.g = [q](double t) { return -t + q * std::pow(std::abs(t), 2.0 * q - 2.0) * t; };
    eq.G = [q](double t) {
        const double t2 = t * t;
        return -0.5 * t2 + 0.5 * std::pow(t2, q);
    };
    eq.energy_density = [q](double s) { return -std::pow(s, q); };
    eq.mu = 1.0;
    eq.zeta0 = 1.0;
    eq.name = "nls_v0";
    return eq;
}

/// Large-multiplier limit profile: -Delta w = -w + c r w^{2r-1}.
inline RadialEquation q_profile_equation(const ModelParams& p) {
    const double r = p.r, cr = p.c_const * p.r, c = p.c_const;
    RadialEquation eq;
    eq.g = [r, cr](double t) { return -t + cr * std::pow(std::abs(t), 2.0 * r - 2.0) * t; };
    eq.G = [r, c](double t) {
        const double t2 = t * t;
        return -0.5 * t2 + 0.5 * c * std::pow(t2, r);
    };
    eq.energy_density = [r, c](double s) { return -c * std::pow(s, r); };
    eq.mu = 1.0;
    eq.zeta0 = std::pow(1.0 / c, 1.0 / (2.0 * (r - 1.0)));
    eq.name = "q_profile";
    return eq;
}

/// Zero-mass equation: -Delta u = g_*(u), algebraic tail u ~ r^{-(d-2)}.
inline RadialEquation zero_mass_equation(const ModelParams& p) {
    RadialEquation eq;
    eq.g = [p](double t) { return g_star(p, t); };
    eq.G = [p](double t) { return big_g_star(p, t); };
    eq.energy_density = [p](double s) { return f1(p, s); };
    eq.mu = 0.0;
    eq.algebraic_tail = true;
    eq.zeta0 = 0.0; // G_* > 0 for all t > 0
    eq.kink_height = std::sqrt(p.alpha);
    eq.name = "zero_mass";
    return eq;
}

// ---- integrator ------------------------------------------------------------

namespace detail {

struct State {
    double u, v;
};

// Cash-Karp 5(4) embedded pair.
template <class Rhs>
inline bool ck_step(const Rhs& rhs, double r, const State& y, double dt, State& out,
                    double& err, double scale_u, double scale_v) {
    static constexpr double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0, a6 = 7.0 / 8;
    static constexpr double b21 = 1.0 / 5;
    static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    static constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27, b54 = 35.0 / 27;
    static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                            b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
    static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594, c6 = 512.0 / 1771;
    static constexpr double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384,
                            d4 = c4 - 13525.0 / 55296, d5 = -277.0 / 14336, d6 = c6 - 0.25;

    State k1 = rhs(r, y);
    State k2 = rhs(r + a2 * dt, {y.u + dt * b21 * k1.u, y.v + dt * b21 * k1.v});
    State k3 = rhs(r + a3 * dt, {y.u + dt * (b31 * k1.u + b32 * k2.u),
                                 y.v + dt * (b31 * k1.v + b32 * k2.v)});
    State k4 = rhs(r + a4 * dt, {y.u + dt * (b41 * k1.u + b42 * k2.u + b43 * k3.u),
                                 y.v + dt * (b41 * k1.v + b42 * k2.v + b43 * k3.v)});
    State k5 = rhs(r + a5 * dt, {y.u + dt * (b51 * k1.u + b52 * k2.u + b53 * k3.u + b54 * k4.u),
                                 y.v + dt * (b51 * k1.v + b52 * k2.v + b53 * k3.v + b54 * k4.v)});
    State k6 = rhs(r + a6 * dt,
                   {y.u + dt * (b61 * k1.u + b62 * k2.u + b63 * k3.u + b64 * k4.u + b65 * k5.u),
                    y.v + dt * (b61 * k1.v + b62 * k2.v + b63 * k3.v + b64 * k4.v + b65 * k5.v)});

    out.u = y.u + dt * (c1 * k1.u + c3 * k3.u + c4 * k4.u + c6 * k6.u);
    out.v = y.v + dt * (c1 * k1.v + c3 * k3.v + c4 * k4.v + c6 * k6.v);
    const double eu = dt * (d1 * k1.u + d3 * k3.u + d4 * k4.u + d5 * k5.u + d6 * k6.u);
    const double ev = dt * (d1 * k1.v + d3 * k3.v + d4 * k4.v + d5 * k5.v + d6 * k6.v);
    err = std::max(std::abs(eu) / scale_u, std::abs(ev) / scale_v);
    return std::isfinite(out.u) && std::isfinite(out.v) && std::isfinite(err);
}

enum class Outcome { TooHigh, TooLow };

// Integrates outward and classifies the trajectory.  If `grid` is non-null,
// steps land exactly on its nodes and node samples are recorded in u_out /
// v_out up to the stop index (returned through n_filled).
struct TraceResult {
    Outcome outcome = Outcome::TooLow;
    double r_stop = 0.0;
    std::size_t n_filled = 0;
};

inline TraceResult trace(const RadialEquation& eq, int d, double height, double r_end,
                         double ode_tol, const RadialGrid* grid = nullptr,
                         std::vector<double>* u_out = nullptr,
                         std::vector<double>* v_out = nullptr) {
    auto rhs = [&](double r, const State& y) -> State {
        return {y.v, -eq.g(y.u) - (d - 1) / r * y.v};
    };
    const double floor_u = 1e-14 * height;
    const double r0 = 1e-8;
    State y{height - eq.g(height) * r0 * r0 / (2.0 * d), -eq.g(height) * r0 / d};
    double r = r0;
    double dt = 1e-4;
    std::size_t fill = 0;
    if (grid) {
        // node 0 is the origin
        (*u_out)[0] = height;
        (*v_out)[0] = 0.0;
        fill = 1;
    }
    const double atol = 1e-16 * std::max(height, 1.0);
    TraceResult res;
    auto finish = [&](Outcome oc, double rstop) {
        res.outcome = oc;
        res.r_stop = rstop;
        res.n_filled = fill;
        return res;
    };
    int rejects = 0;
    while (r < r_end) {
        double step = std::min(dt, r_end - r);
        if (grid && fill < grid->size()) {
            const double next_node = grid->nodes[fill];
            if (next_node > r) step = std::min(step, next_node - r);
        }
        State ynew;
        double err;
        const double scale_u = atol + std::abs(y.u);
        const double scale_v = atol + std::abs(y.v);
        if (!ck_step(rhs, r, y, step, ynew, err, scale_u, scale_v)) {
            dt *= 0.25;
            if (++rejects > 300) throw SolverError("shoot: integrator breakdown");
            continue;
        }
        err /= ode_tol;
        if (err > 1.0) {
            dt = step * std::max(0.2, 0.9 * std::pow(err, -0.25));
            if (++rejects > 10000) throw SolverError("shoot: step control stalled");
            continue;
        }
        rejects = 0;
        r += step;
        y = ynew;
        if (grid && fill < grid->size() && std::abs(r - grid->nodes[fill]) < 1e-12 * (1.0 + r)) {
            (*u_out)[fill] = y.u;
            (*v_out)[fill] = y.v;
            ++fill;
        }
        dt = step * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-4), -0.2)));
        if (y.u <= 0.0) return finish(Outcome::TooHigh, r);
        if (y.v > 0.0) return finish(Outcome::TooLow, r);
        if (!eq.algebraic_tail && y.u < floor_u) return finish(Outcome::TooLow, r);
    }
    if (eq.algebraic_tail) {
        // Heights below the ground state flatten to u -> c1 > 0, heights above
        // cross zero; the sign of (r^{d-2} u)' at the far boundary separates
        // the two long before any crossing enters the domain.
        const double phi = (d - 2) * y.u + r * y.v;
        return finish(phi >= 0.0 ? Outcome::TooLow : Outcome::TooHigh, r);
    }
    return finish(Outcome::TooLow, r);
}

inline double auto_r_max(const RadialEquation& eq) {
    if (eq.algebraic_tail) return 400.0;
    const double mu = eq.mu;
    if (mu <= 1.0) return std::max(30.0, 15.0 / std::sqrt(mu));
    return 40.0 / std::sqrt(mu);
}

inline std::size_t auto_nodes(double r_max) {
    const double n = std::ceil(r_max / 0.0075);
    return static_cast<std::size_t>(std::clamp(n, 3000.0, 20000.0));
}

} // namespace detail

/// Height classification, exposed for bracket diagnostics: +1 if the
/// trajectory from u(0)=height crosses zero (too high), -1 otherwise.
inline int classify_height(const RadialEquation& eq, int d, double height,
                           const ShootOpts& opts = {}) {
    const double r_end = opts.r_max > 0.0 ? opts.r_max : detail::auto_r_max(eq);
    const auto res = detail::trace(eq, d, height, r_end, opts.ode_tol);
    return res.outcome == detail::Outcome::TooHigh ? +1 : -1;
}

/// Shooting solve of -Delta u = g(u) for the positive radial decreasing
/// ground state.  Throws NoBracketError / MaxIterError.
inline GroundState solve_radial_equation(const RadialEquation& eq, int d,
                                         const ShootOpts& opts = {}) {
    const double r_end = opts.r_max > 0.0 ? opts.r_max : detail::auto_r_max(eq);
    double height = opts.fixed_height;
    int steps = 0;

    if (height <= 0.0) {
        double lo = opts.height_lo > 0.0 ? opts.height_lo
                                         : std::max(eq.zeta0 * (1.0 + 1e-9), 1e-8);
        if (eq.algebraic_tail) lo = std::max(lo, 1.0 + 1e-9);
        double hi = opts.height_hi;
        if (detail::trace(eq, d, lo, r_end, opts.ode_tol).outcome == detail::Outcome::TooHigh)
            throw NoBracketError("shoot: lower height already overshoots");
        if (hi <= 0.0) {
            hi = std::max(2.0 * lo, 1.5);
            bool ok = false;
            for (int k = 0; k < 80; ++k) {
                if (detail::trace(eq, d, hi, r_end, opts.ode_tol).outcome ==
                    detail::Outcome::TooHigh) { ok = true; break; }
                hi *= 1.7;
            }
            if (!ok) throw NoBracketError("shoot: no overshoot height found");
        } else if (detail::trace(eq, d, hi, r_end, opts.ode_tol).outcome !=
                   detail::Outcome::TooHigh) {
            throw NoBracketError("shoot: upper height does not overshoot");
        }
        while (hi - lo > opts.height_tol * hi) {
            if (++steps > opts.max_bisect) throw MaxIterError("shoot: bisection cap reached");
            const double mid = 0.5 * (lo + hi);
            if (detail::trace(eq, d, mid, r_end, opts.ode_tol).outcome ==
                detail::Outcome::TooHigh)
                hi = mid;
            else
                lo = mid;
        }
        height = 0.5 * (lo + hi);
    }

    // final pass: land on the output nodes
    const std::size_t n = opts.n_nodes > 0 ? opts.n_nodes : detail::auto_nodes(r_end);
    auto grid = make_uniform_grid(d, r_end, n);
    std::vector<double> uu(grid->size(), 0.0), vv(grid->size(), 0.0);
    const auto tr = detail::trace(eq, d, height, r_end, opts.ode_tol, grid.get(), &uu, &vv);
    std::size_t filled = tr.n_filled;
    // drop a possibly contaminated last sample near an event
    if (filled > 4 && tr.r_stop < r_end * (1.0 - 1e-12)) --filled;

    GroundState gs;
    gs.mu = eq.mu;
    gs.shoot_height = height;
    gs.bisection_steps = steps;
    gs.r_stop = grid->nodes[filled - 1];

    // Tail fit on the outer sampled region, then fill the remaining nodes.
    // The window must avoid both the nonlinear core (small r) and the region
    // where the bisection's residual growing mode contaminates the samples
    // (large r); a residual-driven trim finds the clean range by itself.
    {
        RadialProfile part(grid, uu);
        double rs = gs.r_stop;
        if (!eq.algebraic_tail && eq.mu > 0.0) {
            const double tol = opts.height_tol > 0.0 ? opts.height_tol : 1e-12;
            const double r_clean = 0.5 * std::log(1.0 / tol) / std::sqrt(eq.mu);
            rs = std::min(rs, 0.85 * r_clean);
        }
        const double h = grid->spacing();
        std::size_t ia = static_cast<std::size_t>(std::ceil(std::max(0.5 * rs, h) / h));
        std::size_t ib = std::min(filled - 1,
                                  static_cast<std::size_t>(std::floor(0.95 * rs / h)));
        while (ia > 1 && uu[ia] <= 0.0) ++ia;
        TailFit fit;
        bool have_fit = false;
        for (int attempt = 0; attempt < 25 && ib > ia + 12; ++attempt) {
            try {
                fit = fit_exponential_tail(part, grid->nodes[ia], grid->nodes[ib]);
            } catch (const std::exception&) {
                ib = ia + (ib - ia) * 3 / 4;
                continue;
            }
            if (!std::isfinite(fit.rate) || !std::isfinite(fit.power) ||
                !std::isfinite(fit.amplitude)) {
                ib = ia + (ib - ia) * 3 / 4;
                continue;
            }
            auto log_res = [&](std::size_t i) {
                const double r = grid->nodes[i];
                return std::log(uu[i]) -
                       (std::log(fit.amplitude) - fit.rate * r - fit.power * std::log(r));
            };
            const double res_a = std::abs(log_res(ia)), res_b = std::abs(log_res(ib));
            if (std::max(res_a, res_b) < 1e-3) {
                have_fit = true;
                break;
            }
            // drop the worse end of the window
            if (res_b >= res_a)
                ib = ia + (ib - ia) * 7 / 8;
            else
                ia = ia + std::max<std::size_t>(1, (ib - ia) / 8);
        }
        if (!have_fit) {
            fit.rate = eq.mu > 0 ? std::sqrt(eq.mu) : 0.0;
            fit.power = eq.algebraic_tail ? (d - 2.0) : (d - 1.0) / 2.0;
            fit.amplitude = uu[filled - 1] * std::pow(gs.r_stop, fit.power) *
                            std::exp(fit.rate * gs.r_stop);
        }
        gs.decay = fit;
        // splice to the fitted tail where the samples stop being trusted; the
        // amplitude is matched at the splice node so the profile stays
        // continuous and monotone
        std::size_t splice = eq.algebraic_tail ? filled : std::min(filled, ib + 1);
        if (splice < 2) splice = 2;
        auto tail_log = [&](double A, double r) {
            return std::log(A) - fit.rate * r - fit.power * std::log(r);
        };
        double A_fill = fit.amplitude;
        const double r_last = grid->nodes[splice - 1];
        if (uu[splice - 1] > 0.0)
            A_fill = fit.amplitude * uu[splice - 1] /
                     std::exp(tail_log(fit.amplitude, r_last));
        for (std::size_t i = splice; i < grid->size(); ++i) {
            const double r = grid->nodes[i];
            const double lg = tail_log(A_fill, r);
            const double val = lg < -700.0 ? 0.0 : std::exp(lg);
            uu[i] = val;
            vv[i] = val * (-fit.rate - fit.power / r);
        }
        filled = splice;
        gs.r_stop = grid->nodes[filled - 1];
    }

    gs.profile = RadialProfile(grid, std::move(uu));
    gs.derivative = RadialProfile(grid, std::move(vv));

    // integrals; algebraic tails leave O(R^{2-d}) gradient mass outside the
    // domain, restored here from the fitted amplitude
    const auto ns = norms(gs.profile);
    double grad_total = integrate(gs.derivative, [](double v) { return v * v; });
    double tail_g_int = 0.0; // int_{r>R} G(u_tail)
    double tail_f_int = 0.0; // int_{r>R} F_eq(u_tail^2)
    if (eq.algebraic_tail) {
        const double area = unit_sphere_area(d);
        const double R = grid->r_max();
        const double A = gs.decay.amplitude * std::pow(R, d - 2.0 - gs.decay.power);
        grad_total += area * (d - 2.0) * A * A * std::pow(R, 2.0 - d);
        const int m = 4000;
        const double b = 50.0 * R, hh = (std::log(b) - std::log(R)) / m;
        double sg = 0.0, sf = 0.0; // log-spaced Simpson
        for (int i = 0; i <= m; ++i) {
            const double lr = std::log(R) + hh * i;
            const double r = std::exp(lr);
            const double uval = A * std::pow(r, 2.0 - d);
            const double wgt = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sg += wgt * area * std::pow(r, static_cast<double>(d)) * eq.G(uval);
            sf += wgt * area * std::pow(r, static_cast<double>(d)) * eq.energy_density(uval * uval);
        }
        tail_g_int = sg * hh / 3.0;
        tail_f_int = sf * hh / 3.0;
    }
    gs.lambda_mass = ns.l2_sq;
    gs.grad_sq = grad_total;
    if (!eq.algebraic_tail && gs.decay.rate > 1e-8) {
        // residual mass beyond r_max from the fitted tail (Simpson)
        const double area = unit_sphere_area(d);
        const double a = grid->r_max(), b = a + 60.0 / gs.decay.rate;
        const int m = 2000;
        const double hh = (b - a) / m;
        auto f = [&](double r) {
            const double lg = std::log(gs.decay.amplitude) - gs.decay.rate * r -
                              gs.decay.power * std::log(r);
            const double val = lg < -350.0 ? 0.0 : std::exp(lg);
            return area * std::pow(r, d - 1) * val * val;
        };
        double s = f(a) + f(b);
        for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + hh * i);
        gs.lambda_mass += s * hh / 3.0;
    }
    gs.energy = grad_total + tail_f_int +
                integrate(gs.profile, [&](double v) { return eq.energy_density(v * v); });

    // Pohozaev identity: (d-2)/d ||grad u||^2 = 2 int G(u)
    const double lhs = (d - 2.0) / d * grad_total;
    const double rhs =
        2.0 * (integrate(gs.profile, [&](double v) { return eq.G(v); }) + tail_g_int);
    gs.pohozaev_residual = std::abs(lhs - rhs) /
                           std::max({std::abs(lhs), std::abs(rhs), 0.1 * grad_total, 1e-300});

    // PDE residual with sixth-order stencils on the integrated range, relative
    // to the scale of the right-hand side
    {
        const auto& x = grid->nodes;
        const auto& w = gs.profile.values;
        const double h = grid->spacing();
        auto at = [&](long i) -> double {
            if (i < 0) return w[static_cast<std::size_t>(-i)]; // even extension
            return w[static_cast<std::size_t>(i)];
        };
        double worst = 0.0, scale = 1e-300;
        const long last = static_cast<long>(filled) - 4;
        for (long i = 1; i <= last; ++i) {
            if (eq.kink_height > 0.0) {
                // the solution is only C^3 where u crosses the branch level;
                // high-order stencils are not meaningful across that radius
                const double lo7 = at(i + 3), hi7 = at(std::max<long>(i - 3, 0));
                if (lo7 <= eq.kink_height && eq.kink_height <= hi7) continue;
            }
            const double upp = (2 * at(i - 3) - 27 * at(i - 2) + 270 * at(i - 1) - 490 * at(i) +
                                270 * at(i + 1) - 27 * at(i + 2) + 2 * at(i + 3)) /
                               (180 * h * h);
            const double up = (-at(i - 3) + 9 * at(i - 2) - 45 * at(i - 1) + 45 * at(i + 1) -
                               9 * at(i + 2) + at(i + 3)) /
                              (60 * h);
            const double gi = eq.g(at(i));
            const double res = upp + (d - 1) / x[static_cast<std::size_t>(i)] * up + gi;
            worst = std::max(worst, std::abs(res));
            scale = std::max(scale, std::abs(gi));
        }
        gs.pde_residual = worst / scale;
    }
    return gs;
}

/// Ground state of the canonical EL equation -Delta u = g_mu(u), mu > 0.
inline GroundState solve_ground_state(const ModelParams& p, double mu,
                                      const ShootOpts& opts = {}) {
    if (!(mu > 0.0)) throw std::invalid_argument("solve_ground_state: mu must be positive");
    return solve_radial_equation(el_equation(p, mu), p.d, opts);
}

/// Unique ground state of -Delta v = -v + q v^{2q-1} (q subcritical).
inline GroundState solve_v0(const ModelParams& p, const ShootOpts& opts = {}) {
    if (p.d > 2 && !(p.q < p.d / (p.d - 2.0)))
        throw std::invalid_argument("solve_v0: requires q < d/(d-2)");
    return solve_radial_equation(nls_v0_equation(p), p.d, opts);
}

/// Threshold multiplier of the exact subcritical branch: mu_c = v0(0)^{-2(q-1)}.
inline double subcritical_mu_c(const ModelParams& p, const GroundState& v0) {
    return std::pow(v0.shoot_height, -2.0 * (p.q - 1.0));
}

/// Ground state of the zero-mass equation (q >= d/(d-2), d >= 3).  In the
/// critical case q = d/(d-2) the equation is dilation covariant and the
/// profile is pinned by its height (default 1).
inline GroundState solve_zero_mass(const ModelParams& p, const ShootOpts& opts = {}) {
    if (p.d < 3) throw std::invalid_argument("solve_zero_mass: requires d >= 3");
    const double crit = p.d / (p.d - 2.0);
    if (p.q < crit - 1e-9) throw std::invalid_argument("solve_zero_mass: requires q >= d/(d-2)");
    ShootOpts o = opts;
    if (std::abs(p.q - crit) < 1e-9 && o.fixed_height <= 0.0) o.fixed_height = 1.0;
    return solve_radial_equation(zero_mass_equation(p), p.d, o);
}

/// Unique ground state Q of -Delta w = -w + c r w^{2r-1}.
inline GroundState solve_q_profile(const ModelParams& p, const ShootOpts& opts = {}) {
    if (p.d > 2 && !(p.r < p.d / (p.d - 2.0)))
        throw std::invalid_argument("solve_q_profile: requires r < d/(d-2)");
    return solve_radial_equation(q_profile_equation(p), p.d, opts);
}

// ---- derived functionals -----------------------------------------------------

struct DualMax {
    double m_of_g = 0.0; // int G_mu(v) at the unit-gradient dilation of u
    double theta = 0.0;  // squared dilation; theta * m_of_g = (d-2)/(2d)
};

/// Rescales u to v(x) = u(s x) with ||grad v||_2 = 1 and evaluates the dual
/// constrained maximum int G_mu(v); theta = s^2 satisfies
/// theta * M(G_mu) = (d-2)/(2d) by the Pohozaev identity.
inline DualMax dual_max_functional(const GroundState& gs, const ModelParams& p, double mu) {
    if (p.d < 3) throw std::invalid_argument("dual_max_functional: requires d >= 3");
    const double grad = gs.grad_sq > 0.0 ? gs.grad_sq : norms(gs.profile).grad_l2_sq;
    if (!(grad > 0.0)) throw std::domain_error("dual_max_functional: zero gradient norm");
    const double s = std::pow(grad, 1.0 / (p.d - 2.0));
    DualMax out;
    out.theta = s * s;
    const double intG = integrate(gs.profile, [&](double v) { return big_g(p, mu, v); });
    out.m_of_g = intG / std::pow(s, p.d);
    return out;
}

struct MuCurveRow {
    double mu = 0.0;
    double lambda = 0.0;
    double energy = 0.0;
    bool ok = false;
    std::string error;
};

/// One ground-state solve per multiplier; failed rows are marked, not fatal.
inline std::vector<MuCurveRow> lambda_of_mu_curve(const ModelParams& p,
                                                  const std::vector<double>& mu_list,
                                                  const ShootOpts& opts = {}) {
    std::vector<MuCurveRow> rows(mu_list.size());
    parallel_for(mu_list.size(), [&](std::size_t i) {
        rows[i].mu = mu_list[i];
        try {
            const GroundState gs = solve_ground_state(p, mu_list[i], opts);
            rows[i].lambda = gs.lambda_mass;
            rows[i].energy = gs.energy;
            rows[i].ok = true;
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });
    return rows;
}

/// Two-point log-log slope between the first and last rows of a table.
inline double log_slope(double x0, double y0, double x1, double y1) {
    return (std::log(y1) - std::log(y0)) / (std::log(x1) - std::log(x0));
}

} // namespace concnls
