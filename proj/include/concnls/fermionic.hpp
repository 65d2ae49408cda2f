#pragma once

// Fermionic side: a radially-restricted self-consistent field over angular
// momentum channels (an upper-bound estimator for I_alpha(N)), the two-center
// rank-2 projector built from far-separated copies of the mass-1 orbital
// (the binding certificate), critical-coupling scans, and the Yukawa kernel
// used by the overlap estimates.
//
// All heavy computation runs in the coupling frame of the exact rescale
//   E_alpha(gamma) = alpha^{2/d} Etilde_beta(gamma'),  beta = alpha^{q-(d+2)/d},
// which maps the minimizers to O(1) length scales for any threshold; results
// carry both frames.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <lapacke.h>

#include "concnls/bosonic.hpp"
#include "concnls/errors.hpp"
#include "concnls/grid.hpp"
#include "concnls/model.hpp"
#include "concnls/shoot.hpp"

namespace concnls {

// ---- SCF -------------------------------------------------------------------

struct ScfOpts {
    int lmax = 4;
    std::size_t n_nodes = 2000;
    double r_max = 16.0;        // beta-frame radial extent
    double mixing = 0.3;
    double density_tol = 1e-8;  // L1 tolerance on the density update
    int max_iter = 800;
    int eig_per_channel = 8;
    double seed_peak = 8.0;     // beta-frame peak density of the seed
};

struct ScfLevel {
    int l = 0;
    int k = 0;                  // radial index within the channel
    double eigenvalue = 0.0;    // beta frame (alpha units: x alpha^{2/d})
    double occupation = 0.0;    // particles in the (l,k) shell, in [0, 2l+1]
    std::vector<double> orbital; // reduced wave P(r), ||P||_2 = 1
};

struct ScfState {
    ModelParams params;
    double beta = 0.0;
    double energy_factor = 1.0; // alpha^{2/d}
    double length_factor = 1.0; // alpha^{-1/d}: r_alpha = length_factor * r_beta
    int n_particles = 0;
    std::vector<ScfLevel> levels; // bound levels, ascending (eigenvalue, l)
    RadialProfile density;        // beta-frame rho(r) on the radial grid
    double energy_beta = 0.0;
    double energy = 0.0;          // alpha units
    int iterations = 0;
    std::vector<double> energy_history;
    // Shell gap: eigenvalue distance from the highest occupied level to the
    // lowest entirely empty level (0 = continuum edge when none is bound).
    // With multiplicity counting, a partially filled shell has zero gap; both
    // readings are exposed.
    double fermi_gap_beta = 0.0;
    double fermi_gap = 0.0;
    double fermi_gap_multiplicity_beta = 0.0;
    bool fermi_tie = false;
    bool converged = false;
};

namespace detail {

struct ChannelEig {
    std::vector<double> values;          // ascending
    std::vector<std::vector<double>> vecs; // normalized sum P^2 h = 1
};

/// Lowest eigenpairs of -P'' + [l(l+1)/r^2 + V] P with Dirichlet ends,
/// via LAPACK's tridiagonal RRR driver.
inline ChannelEig channel_eigs(const std::vector<double>& rr, double h, int l,
                               const std::vector<double>& V, int want) {
    const lapack_int n = static_cast<lapack_int>(rr.size());
    std::vector<double> diag(n), off(n - 1, -1.0 / (h * h));
    for (lapack_int i = 0; i < n; ++i)
        diag[i] = 2.0 / (h * h) + l * (l + 1.0) / (rr[i] * rr[i]) + V[i];
    const lapack_int iu = std::min<lapack_int>(want, n);
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * iu);
    std::vector<lapack_int> isuppz(2 * iu);
    lapack_int m = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(),
                                           off.data(), 0.0, 0.0, 1, iu, 0.0, &m, w.data(),
                                           z.data(), n, isuppz.data());
    if (info != 0) throw SolverError("scf: tridiagonal eigensolver failed");
    ChannelEig out;
    out.values.assign(w.begin(), w.begin() + m);
    out.vecs.resize(m);
    const double inv = 1.0 / std::sqrt(h);
    for (lapack_int j = 0; j < m; ++j) {
        out.vecs[j].resize(n);
        for (lapack_int i = 0; i < n; ++i)
            out.vecs[j][i] = z[static_cast<std::size_t>(j) * n + i] * inv;
    }
    return out;
}

} // namespace detail

/// Radially-restricted SCF in d = 3 with m-averaged densities for partially
/// filled shells; an upper-bound estimator for I_alpha(N).  Iterates
/// rho -> V = beta F1'(rho) -> channel eigenproblems -> Aufbau filling ->
/// linear mixing, with mixing halved whenever the energy rises.
inline ScfState scf(const ModelParams& p, int n_particles, const ScfOpts& opts = {}) {
    if (p.d != 3) throw std::invalid_argument("scf: the channel reduction requires d = 3");
    if (n_particles < 1) throw std::invalid_argument("scf: need N >= 1");

    const auto sc = rescale_alpha_to_beta(p);
    const double beta = sc.beta;
    const std::size_t n = opts.n_nodes;
    const double h = opts.r_max / static_cast<double>(n);
    std::vector<double> rr(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) rr[i] = h * static_cast<double>(i + 1);
    std::vector<double> w3(rr.size());
    for (std::size_t i = 0; i < rr.size(); ++i) w3[i] = 4.0 * M_PI * rr[i] * rr[i] * h;

    // concentrated seed density of mass N
    std::vector<double> rho(rr.size());
    {
        const double sig =
            std::cbrt(n_particles / (opts.seed_peak * std::pow(2.0 * M_PI, 1.5)));
        for (std::size_t i = 0; i < rr.size(); ++i)
            rho[i] = opts.seed_peak * std::exp(-rr[i] * rr[i] / (2.0 * sig * sig));
    }

    ScfState st;
    st.params = p;
    st.beta = beta;
    st.energy_factor = sc.energy_factor;
    st.length_factor = std::pow(p.alpha, -1.0 / p.d);
    st.n_particles = n_particles;

    // One evaluation: diagonalize the channels at a given density, fill by
    // ascending eigenvalue, and return the Aufbau state.
    struct Eval {
        std::vector<ScfLevel> levels;
        std::vector<double> rho_out;
        double energy = 0.0;
        bool complete = false;
    };
    auto evaluate = [&](const std::vector<double>& dens) {
        Eval ev;
        std::vector<double> V(rr.size());
        for (std::size_t i = 0; i < rr.size(); ++i) V[i] = beta * f1_prime(p, dens[i]);
        for (int l = 0; l <= opts.lmax; ++l) {
            const auto eig = detail::channel_eigs(rr, h, l, V, opts.eig_per_channel);
            for (std::size_t k = 0; k < eig.values.size(); ++k) {
                if (eig.values[k] >= 0.0) break;
                ScfLevel lev;
                lev.l = l;
                lev.k = static_cast<int>(k);
                lev.eigenvalue = eig.values[k];
                lev.orbital = eig.vecs[k];
                ev.levels.push_back(std::move(lev));
            }
        }
        std::sort(ev.levels.begin(), ev.levels.end(),
                  [](const ScfLevel& a, const ScfLevel& b) {
                      if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
                      return a.l < b.l; // deterministic tie break: lower channel first
                  });
        int left = n_particles;
        ev.rho_out.assign(rr.size(), 0.0);
        double kinetic = 0.0;
        for (auto& lev : ev.levels) {
            if (left <= 0) {
                lev.occupation = 0.0;
                continue;
            }
            const int o = std::min(2 * lev.l + 1, left);
            left -= o;
            lev.occupation = o;
            const auto& P = lev.orbital;
            double t = 0.0, prev = 0.0;
            for (std::size_t i = 0; i < rr.size(); ++i) {
                ev.rho_out[i] += o * P[i] * P[i] / (4.0 * M_PI * rr[i] * rr[i]);
                const double dP = (P[i] - prev) / h;
                t += dP * dP * h + lev.l * (lev.l + 1.0) * P[i] * P[i] / (rr[i] * rr[i]) * h;
                prev = P[i];
            }
            t += prev * prev / h; // last interval to the Dirichlet wall
            kinetic += o * t;
        }
        ev.complete = (left == 0);
        double e_nl = 0.0;
        for (std::size_t i = 0; i < rr.size(); ++i) e_nl += w3[i] * f1(p, ev.rho_out[i]);
        ev.energy = kinetic + beta * e_nl;
        return ev;
    };

    double theta = opts.mixing;
    int it = 0;
    Eval cur = evaluate(rho);
    st.energy_history.push_back(cur.energy);
    for (; it < opts.max_iter; ++it) {
        double drho = 0.0;
        for (std::size_t i = 0; i < rr.size(); ++i)
            drho += w3[i] * std::abs(cur.rho_out[i] - rho[i]);
        if (drho <= opts.density_tol) {
            if (!cur.complete) break; // settled without enough bound levels
            st.levels = cur.levels;
            st.energy_beta = cur.energy;
            st.converged = true;
            break;
        }
        // mixing step with revert-on-increase control
        const double noise = 1e-11 * (1.0 + std::abs(cur.energy));
        double th = theta;
        for (int retry = 0; retry < 8; ++retry) {
            std::vector<double> rho_try(rr.size());
            for (std::size_t i = 0; i < rr.size(); ++i)
                rho_try[i] = (1.0 - th) * rho[i] + th * cur.rho_out[i];
            Eval next = evaluate(rho_try);
            if (next.energy <= cur.energy + noise || !next.complete || retry == 7) {
                rho = std::move(rho_try);
                cur = std::move(next);
                break;
            }
            th *= 0.5;
        }
        st.energy_history.push_back(cur.energy);
        theta = std::min(opts.mixing, th * 1.3);
    }
    st.iterations = it;
    if (!st.converged) {
        if (!cur.complete)
            throw NoBoundStateError("scf: fewer bound levels than particles");
        throw MaxIterError("scf: density mixing did not converge");
    }

    // final density on a proper radial grid (node 0 appended by extrapolation)
    auto grid = make_uniform_grid(3, opts.r_max, n);
    std::vector<double> dv(grid->size(), 0.0);
    {
        std::vector<double> rho_fin(rr.size(), 0.0);
        for (const auto& lev : st.levels)
            for (std::size_t i = 0; i < rr.size(); ++i)
                rho_fin[i] +=
                    lev.occupation * lev.orbital[i] * lev.orbital[i] /
                    (4.0 * M_PI * rr[i] * rr[i]);
        for (std::size_t i = 0; i < rr.size(); ++i) dv[i + 1] = rho_fin[i];
        dv[0] = (4.0 * dv[1] - dv[2]) / 3.0;
    }
    st.density = RadialProfile(grid, std::move(dv));
    st.energy = st.energy_factor * st.energy_beta;

    // gaps: shell reading (distance to the first entirely empty level) and
    // the multiplicity reading of the mean-field spectrum
    {
        double homo = 0.0, next = 0.0;
        bool have_next = false;
        for (const auto& lev : st.levels) { // sorted ascending
            if (lev.occupation > 0.0) {
                homo = lev.eigenvalue;
            } else if (!have_next) {
                next = lev.eigenvalue;
                have_next = true;
            }
        }
        if (!have_next) next = 0.0; // continuum edge
        st.fermi_gap_beta = next - homo;
        st.fermi_gap = st.energy_factor * st.fermi_gap_beta;

        std::vector<double> glob;
        for (const auto& lev : st.levels)
            for (int m = 0; m < 2 * lev.l + 1; ++m) glob.push_back(lev.eigenvalue);
        std::sort(glob.begin(), glob.end());
        const std::size_t N = static_cast<std::size_t>(n_particles);
        const double eN = glob.size() >= N ? glob[N - 1] : 0.0;
        const double eN1 = glob.size() >= N + 1 ? glob[N] : 0.0;
        st.fermi_gap_multiplicity_beta = eN1 - eN;
        for (std::size_t i = 1; i < st.levels.size(); ++i)
            if (std::abs(st.levels[i].eigenvalue - st.levels[i - 1].eigenvalue) < 1e-10)
                st.fermi_tie = true;
    }
    return st;
}

/// Richardson extrapolation of the SCF energy from two resolutions (the
/// discretization is cleanly second order), for tight cross-module checks.
struct ScfRichardson {
    ScfState coarse;
    ScfState fine;
    double energy_beta = 0.0;
    double energy = 0.0;
};

inline ScfRichardson scf_energy_richardson(const ModelParams& p, int n_particles,
                                           const ScfOpts& opts = {}) {
    ScfRichardson out;
    out.coarse = scf(p, n_particles, opts);
    ScfOpts fine = opts;
    fine.n_nodes = 2 * opts.n_nodes;
    out.fine = scf(p, n_particles, fine);
    out.energy_beta = (4.0 * out.fine.energy_beta - out.coarse.energy_beta) / 3.0;
    out.energy = out.fine.energy_factor * out.energy_beta;
    return out;
}

// ---- two-center rank-2 state -------------------------------------------------

struct TwoCenterOpts {
    double pad = 0.0;        // grid padding beyond the centers; 0 = auto
    double s_extent = 0.0;   // transverse extent; 0 = auto
    std::size_t nz = 1400;
    std::size_t ns = 520;
};

struct TwoCenterState {
    double separation = 0.0; // beta frame
    double overlap = 0.0;    // eps_R = <u-, u+>
    std::array<std::array<double, 2>, 2> gram{{{1.0, 0.0}, {0.0, 1.0}}};
    double kinetic = 0.0;        // Tr(-Delta gamma_R), beta frame
    double nonlinear = 0.0;      // int F1(rho_R) (coupling not applied)
    double total_beta = 0.0;     // kinetic + beta * nonlinear
    double total = 0.0;          // alpha units
    double single_kinetic = 0.0;   // one-center pieces on the same grid
    double single_nonlinear = 0.0;
    double single_energy_beta = 0.0; // single_kinetic + beta * single_nonlinear
    double margin_beta = 0.0;    // 2 * single - total
    double margin = 0.0;         // alpha units
    double attraction = 0.0;     // int [F1(rho-+rho+) - F1(rho-) - F1(rho+)]
    double kinetic_cross = 0.0;  // int grad u- . grad u+
    double ortho_residual = 0.0; // Loewdin orthonormalization defect
};

/// Mass-1 radial orbital with its derivative (both in the beta frame).
struct Orbital {
    RadialProfile u;
    RadialProfile du;
    double mu = 0.0; // EL multiplier; sqrt(mu) is the decay rate
};

/// Exact dilation u(x) -> u(sigma x) of a shooting result (no resampling);
/// the multiplier maps to sigma^2 mu.
inline Orbital dilate_orbital(const GroundState& gs, double sigma) {
    const auto& g = *gs.profile.grid;
    auto grid = make_uniform_grid(g.d, g.r_max() / sigma, g.size() - 1);
    Orbital o;
    o.u = RadialProfile(grid, gs.profile.values);
    std::vector<double> dv(gs.derivative.values);
    for (auto& x : dv) x *= sigma;
    o.du = RadialProfile(grid, std::move(dv));
    o.mu = sigma * sigma * gs.mu;
    return o;
}

/// Rank-2 projector onto the span of two translates of a mass-1 orbital at
/// separation R, orthonormalized through the closed-form inverse square root
/// of the 2x2 Gram matrix; energies by cylindrical quadrature.
inline TwoCenterState two_center_energy(const ModelParams& p, const Orbital& orb, double R,
                                        const TwoCenterOpts& opts = {}) {
    if (!(R > 0.0)) throw std::invalid_argument("two_center_energy: R must be positive");
    const double beta = rescale_alpha_to_beta(p).beta;
    const double rmax_u = orb.u.grid->r_max();
    const double pad = opts.pad > 0.0 ? opts.pad : 0.75 * rmax_u;
    const double sext = opts.s_extent > 0.0 ? opts.s_extent : 0.75 * rmax_u;
    const auto cyl = make_cyl_grid(0.5 * R + pad, sext, opts.nz, opts.ns);

    const double c = 0.5 * R;
    auto dist_m = [&](double z, double s) { return std::sqrt((z + c) * (z + c) + s * s); };
    auto dist_p = [&](double z, double s) { return std::sqrt((z - c) * (z - c) + s * s); };

    TwoCenterState out;
    out.separation = R;

    // Gram data under the grid's own inner product; orthonormalizing against
    // these norms makes the discrete rank-2 projector exact
    const double raw_eps = cyl.integrate([&](double z, double s) {
        return orb.u.at(dist_m(z, s)) * orb.u.at(dist_p(z, s));
    });
    const double n_m = cyl.integrate([&](double z, double s) {
        const double um = orb.u.at(dist_m(z, s));
        return um * um;
    });
    const double n_p = cyl.integrate([&](double z, double s) {
        const double up = orb.u.at(dist_p(z, s));
        return up * up;
    });
    const double nn = 0.5 * (n_m + n_p);
    const double eps = raw_eps / nn;
    if (!(eps < 1.0 - 1e-12) || !(eps > -1e-6))
        throw SolverError("two_center_energy: Gram matrix not positive definite");
    out.overlap = eps;
    out.gram = {{{1.0, eps}, {eps, 1.0}}};
    out.ortho_residual = std::abs(n_m - n_p) / nn; // mirror symmetry defect

    const double k_same = cyl.integrate([&](double z, double s) {
        const double g1 = orb.du.at(dist_m(z, s));
        return g1 * g1;
    });
    const double k_cross = cyl.integrate([&](double z, double s) {
        const double d1 = dist_m(z, s), d2 = dist_p(z, s);
        if (d1 < 1e-12 || d2 < 1e-12) return 0.0;
        const double dot = ((z + c) * (z - c) + s * s) / (d1 * d2);
        return orb.du.at(d1) * orb.du.at(d2) * dot;
    });
    out.kinetic_cross = k_cross;
    const double denom = nn * (1.0 - eps * eps);
    out.kinetic = (2.0 * k_same - 2.0 * eps * k_cross) / denom;

    out.nonlinear = cyl.integrate([&](double z, double s) {
        const double um = orb.u.at(dist_m(z, s)), up = orb.u.at(dist_p(z, s));
        const double rho = (um * um + up * up - 2.0 * eps * um * up) / denom;
        return f1(p, std::max(rho, 0.0));
    });
    out.attraction = cyl.integrate([&](double z, double s) {
        const double um = orb.u.at(dist_m(z, s)), up = orb.u.at(dist_p(z, s));
        return f1(p, um * um + up * up) - f1(p, um * um) - f1(p, up * up);
    });

    const double nl_single = cyl.integrate([&](double z, double s) {
        const double um = orb.u.at(dist_m(z, s));
        return f1(p, um * um / nn); // one normalized center
    });
    out.single_kinetic = k_same / nn;
    out.single_nonlinear = nl_single;
    out.single_energy_beta = out.single_kinetic + beta * out.single_nonlinear;

    out.total_beta = out.kinetic + beta * out.nonlinear;
    out.margin_beta = 2.0 * out.single_energy_beta - out.total_beta;
    const double efac = rescale_alpha_to_beta(p).energy_factor;
    out.total = efac * out.total_beta;
    out.margin = efac * out.margin_beta;
    return out;
}

// ---- critical couplings -------------------------------------------------------

/// Mass-1 optimizer in the beta frame at the bosonic critical coupling
/// alpha_c^(1): the dilated critical-mass minimizer.  Also returns the frame
/// data needed by the two-center scans.
struct CriticalOrbital {
    Orbital orbital;        // beta-frame mass-1 profile
    double alpha_c1 = 0.0;  // = lambda_c^{(2/d)/(q-(d+2)/d)}
    double lambda_c = 0.0;
    double mu_star = 0.0;   // alpha = 1 multiplier of the critical minimizer
    double k_single = 0.0;  // ||grad u||^2 on the orbital's own radial grid
    double nl_single = 0.0; // int F1(u^2) likewise
};

inline CriticalOrbital critical_orbital(const ModelParams& family, const ShootOpts& sopts = {}) {
    const auto p1 = with_alpha(family, 1.0);
    const auto br = shooting_branch(p1, 0.25, 4.0, 1e-10, sopts);
    const auto gs = solve_ground_state(p1, br.mu_star, sopts);
    CriticalOrbital out;
    out.lambda_c = br.lambda_c;
    out.mu_star = br.mu_star;
    const double expo = (2.0 / family.d) / (family.q - (family.d + 2.0) / family.d);
    out.alpha_c1 = std::pow(br.lambda_c, expo);
    // dilation sending the critical minimizer to the mass-1 beta-frame state:
    // sigma^d = lambda_c
    const double sigma = std::pow(br.lambda_c, 1.0 / family.d);
    out.orbital = dilate_orbital(gs, sigma);
    out.k_single = integrate(out.orbital.du, [](double v) { return v * v; });
    out.nl_single =
        integrate(out.orbital.u, [&](double v) { return f1(family, v * v); });
    return out;
}

struct AlphaScanOpts {
    std::vector<double> r_list; // two-center separations (beta frame); empty = auto
    TwoCenterOpts cyl;
    ShootOpts shoot;
};

/// Computed I_alpha(2) upper bound built once from the critical orbital:
/// accurate one-center energies from the radial quadrature plus the
/// cylindrical-grid interaction differences of the two-center state (the
/// same-grid one-center reference cancels the quadrature bias of the
/// interaction part).  Both pieces are linear in the coupling, so coupling
/// scans are closed-form after construction.
class TwoCenterBound {
  public:
    struct Row {
        double R = 0.0;
        double overlap = 0.0;
        double attraction = 0.0;
        double dk = 0.0;  // pair kinetic  - 2 x one-center kinetic (same grid)
        double dnl = 0.0; // pair nonlinear - 2 x one-center nonlinear
    };

    TwoCenterBound(const ModelParams& family, const CriticalOrbital& co,
                   const AlphaScanOpts& opts = {})
        : family_(family), k1_(co.k_single), nl1_(co.nl_single) {
        std::vector<double> rs = opts.r_list;
        if (rs.empty()) {
            const double unit = 1.0 / std::sqrt(co.orbital.mu);
            for (double x = 4.0; x <= 11.0; x += 0.7) rs.push_back(x * unit);
        }
        const auto p1 = with_alpha(family, 1.0);
        for (double R : rs) {
            const auto tc = two_center_energy(p1, co.orbital, R, opts.cyl);
            Row row;
            row.R = R;
            row.overlap = tc.overlap;
            row.attraction = tc.attraction;
            row.dk = tc.kinetic - 2.0 * tc.single_kinetic;
            row.dnl = tc.nonlinear - 2.0 * tc.single_nonlinear;
            rows_.push_back(row);
        }
    }

    const std::vector<Row>& rows() const { return rows_; }
    double single_kinetic() const { return k1_; }
    double single_nonlinear() const { return nl1_; }

    /// Best two-center Etilde_beta(gamma_R) over the separation scan.
    double energy_beta(double beta) const {
        double best = 1e300;
        for (const auto& r : rows_)
            best = std::min(best, 2.0 * (k1_ + beta * nl1_) + r.dk + beta * r.dnl);
        return best;
    }

    /// Upper bound for I_alpha(2) in original units.
    double i2_alpha(double alpha) const {
        const auto pa = with_alpha(family_, alpha);
        const auto sc = rescale_alpha_to_beta(pa);
        return sc.energy_factor * energy_beta(sc.beta);
    }

  private:
    ModelParams family_;
    double k1_, nl1_;
    std::vector<Row> rows_;
};


// ---- critical-coupling scans ---------------------------------------------------

struct AlphaCScan {
    CriticalScan scan;
    std::string estimator;           // "bosonic-shooting" | "two-center" | "scf"
    double exact_relation_alpha = 0.0; // N = 1 cross check: lambda_c^{(2/d)/(q-(d+2)/d)}
};

/// Bisection in alpha on the sign of the computed I_alpha(N).  N = 1 probes the
/// bosonic energy through the mass scaling (and records the exact relation);
/// N = 2 uses the two-center upper bound; N >= 3 the SCF estimator with
/// NoBoundState counted as zero.
inline AlphaCScan find_alpha_c(const ModelParams& family, int n_particles, double lo,
                               double hi, double tol, const AlphaScanOpts& opts = {}) {
    if (!(0.0 < lo && lo < hi)) throw BracketError("find_alpha_c: bad bracket order");
    AlphaCScan out;
    const auto p1 = with_alpha(family, 1.0);
    const double eps_E = 1e-9;

    std::function<double(double)> computed_i;
    if (n_particles == 1) {
        out.estimator = "bosonic-shooting";
        const auto br = shooting_branch(p1, 0.25, 4.0, 1e-10, opts.shoot);
        const double expo = (2.0 / family.d) / (family.q - (family.d + 2.0) / family.d);
        out.exact_relation_alpha = std::pow(br.lambda_c, expo);
        computed_i = [family, p1, br, opts](double alpha) {
            const auto pa = with_alpha(family, alpha);
            const auto map = bosonic_scaling_map(pa, 1.0);
            return map.pair.energy_factor *
                   j1_shooting(p1, map.pair.lambda_prime, br, 1e-9, opts.shoot);
        };
    } else if (n_particles == 2) {
        out.estimator = "two-center";
        const auto co = critical_orbital(family, opts.shoot);
        out.exact_relation_alpha = co.alpha_c1;
        auto bound = std::make_shared<TwoCenterBound>(family, co, opts);
        computed_i = [bound](double alpha) { return std::min(bound->i2_alpha(alpha), 0.0); };
    } else {
        out.estimator = "scf";
        computed_i = [family, n_particles](double alpha) {
            try {
                return std::min(scf(with_alpha(family, alpha), n_particles).energy, 0.0);
            } catch (const NoBoundStateError&) {
                return 0.0;
            }
        };
    }

    auto& scan = out.scan;
    scan.lo = lo;
    scan.hi = hi;
    scan.tolerance = tol;
    auto probe = [&](double a) {
        const double v = computed_i(a);
        scan.steps.push_back({a, v, 0.0, 0});
        return v;
    };
    if (probe(lo) < -eps_E) throw BracketError("find_alpha_c: I(lo) already negative");
    if (probe(hi) >= -eps_E) throw BracketError("find_alpha_c: I(hi) not negative");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (probe(mid) < -eps_E ? hi : lo) = mid;
        if (++scan.iterations > 200) throw MaxIterError("find_alpha_c: too many bisections");
    }
    scan.estimate = 0.5 * (lo + hi);
    return out;
}

// ---- binding report -------------------------------------------------------------

struct BindingReport {
    int n = 0;
    std::vector<double> i_upper; // computed upper bounds for I(1..N), alpha units
    struct Line {
        int k = 0;
        double lhs = 0.0;    // I(N)
        double rhs = 0.0;    // I(N-k) + I(k)
        double margin = 0.0; // rhs - lhs
        bool holds = false;
    };
    std::vector<Line> inequalities;
    bool binding_evidence = false;
    // computed values are upper bounds: a strict numerical inequality is
    // evidence for binding, not a proof
    std::string note = "upper-bound estimators; strict inequalities are evidence only";
};

/// Strong-binding inequalities I(N) < I(N-K) + I(K) on computed upper bounds.
/// I(1) comes from the bosonic module (the two problems coincide at unit
/// mass), I(2) additionally from the two-center state.
inline BindingReport binding_report(const ModelParams& p, int n_particles,
                                    const AlphaScanOpts& opts = {}) {
    if (n_particles < 2) throw std::invalid_argument("binding_report: need N >= 2");
    BindingReport rep;
    rep.n = n_particles;
    const auto family = with_alpha(p, 1.0);
    const auto br = shooting_branch(family, 0.25, 4.0, 1e-10, opts.shoot);
    const auto map = bosonic_scaling_map(p, 1.0);
    rep.i_upper.resize(n_particles + 1, 0.0);
    rep.i_upper[1] = std::min(
        0.0, map.pair.energy_factor *
                 j1_shooting(family, map.pair.lambda_prime, br, 1e-9, opts.shoot));
    for (int k = 2; k <= n_particles; ++k) {
        double val = 0.0;
        try {
            val = std::min(val, scf(p, k).energy);
        } catch (const NoBoundStateError&) {
        } catch (const MaxIterError&) {
        }
        if (k == 2) {
            const auto co = critical_orbital(family, opts.shoot);
            const TwoCenterBound bound(family, co, opts);
            val = std::min(val, bound.i2_alpha(p.alpha));
        }
        rep.i_upper[k] = val;
    }
    for (int k = 1; k <= n_particles - 1; ++k) {
        BindingReport::Line line;
        line.k = k;
        line.lhs = rep.i_upper[n_particles];
        line.rhs = rep.i_upper[n_particles - k] + rep.i_upper[k];
        line.margin = line.rhs - line.lhs;
        line.holds = line.lhs < line.rhs;
        rep.inequalities.push_back(line);
    }
    rep.binding_evidence =
        std::all_of(rep.inequalities.begin(), rep.inequalities.end(),
                    [](const BindingReport::Line& l) { return l.holds; });
    return rep;
}

// ---- Yukawa kernel ---------------------------------------------------------------

/// Screened kernel with (-Delta + m^2) Y_m = delta_0; closed form in d = 3.
inline double yukawa(int d, double m, double r) {
    if (d != 3) throw std::invalid_argument("yukawa: closed form implemented for d = 3");
    if (!(m > 0.0)) throw std::domain_error("yukawa: rate must be positive");
    if (!(r > 0.0)) throw std::domain_error("yukawa: r must be positive");
    return std::exp(-m * r) / (4.0 * M_PI * r);
}

/// Radial convolution in R^3:
///   (f*g)(R) = (2 pi / R) int_0^inf s f(s) [H(R+s) - H(|R-s|)] ds,
/// with H the cumulative of t g(t); both stages fully numeric.
template <class F, class G>
double radial_convolve_3d(F&& f, G&& g, double R, double extent, std::size_t n = 20000) {
    const double h = extent / static_cast<double>(n);
    std::vector<double> H(2 * n + 1, 0.0); // cumulative of t g(t) on [0, 2 extent]
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 1; i < H.size(); ++i) {
        const double t = h * static_cast<double>(i);
        const double cur = t * g(t);
        acc += 0.5 * (prev + cur) * h;
        prev = cur;
        H[i] = acc;
    }
    auto Hat = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double pos = std::min(x / h, static_cast<double>(H.size() - 1) - 1e-9);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double fr = pos - static_cast<double>(i);
        return (1.0 - fr) * H[i] + fr * H[i + 1];
    };
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double sN = h * static_cast<double>(i);
        const double wg = (i == n) ? 0.5 : 1.0;
        sum += wg * sN * f(sN) * (Hat(R + sN) - Hat(std::abs(R - sN))) * h;
    }
    return 2.0 * M_PI / R * sum;
}

struct YukawaConvReport {
    double a = 0.0, b = 0.0;
    double max_rel_err = 0.0;
    bool pass = false;
    std::vector<std::array<double, 3>> samples; // r, numeric, closed form
};

/// Y_a * Y_b = (Y_a - Y_b) / (b^2 - a^2) under the standard convolution;
/// checked by the numeric radial convolution on r in [0.5, 10].
inline YukawaConvReport yukawa_conv_identity_check(double a, double b, double tol = 1e-3) {
    if (a == b) throw std::invalid_argument("yukawa identity check: need a != b");
    YukawaConvReport rep;
    rep.a = a;
    rep.b = b;
    const double extent = 25.0 / std::min(a, b) + 12.0;
    auto Ya = [a](double r) { return yukawa(3, a, r); };
    auto Yb = [b](double r) { return yukawa(3, b, r); };
    for (double r = 0.5; r <= 10.0 + 1e-9; r += 0.25) {
        const double num = radial_convolve_3d(Ya, Yb, r, extent);
        const double closed = (yukawa(3, a, r) - yukawa(3, b, r)) / (b * b - a * a);
        rep.samples.push_back({r, num, closed});
        rep.max_rel_err = std::max(rep.max_rel_err, std::abs(num - closed) / std::abs(closed));
    }
    rep.pass = rep.max_rel_err <= tol;
    return rep;
}

} // namespace concnls
