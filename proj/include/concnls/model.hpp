#pragma once

// Concave-regularized attractive nonlinearity
//
//   F_alpha(t) = alpha^q F1(t/alpha),
//   F1(t)      = -t^q                     for t <= 1,
//                -a + b t - c t^r         for t >= 1,
//
// with 1 < r < (d+2)/d < q and the branch-matching constants
//   a = (q-1)(q-r)/r,  b = q(q-r)/(r-1),  c = q(q-1)/(r(r-1)),
// which make F1 concave and C^2 across t = 1.  This header also carries
// the Euler-Lagrange right-hand side g_mu, its antiderivative G_mu, the
// small-amplitude correction E(alpha,t) of the large-multiplier rescaling,
// and the exact parameter/mass scaling maps between couplings.

#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace concnls {

struct ModelParams {
    int d = 3;          // spatial dimension
    double q = 2.0;     // supercritical exponent (t -> 0 behaviour)
    double r = 4.0 / 3.0; // subcritical exponent (t -> infinity behaviour)
    double alpha = 1.0; // regularization threshold
    // derived branch constants, always recomputed at construction
    double a_const = 0.0;
    double b_const = 0.0;
    double c_const = 0.0;
};

// Strict margin keeping the constants b, c away from the r -> 1 pole.
inline constexpr double kExponentMargin = 1e-12;

inline ModelParams make_model_params(int d, double q, double r, double alpha = 1.0) {
    if (d < 1) throw std::invalid_argument("model: dimension must be >= 1");
    const double crit = (d + 2.0) / d;
    if (!(r > 1.0 + kExponentMargin))
        throw std::invalid_argument("model: need r > 1");
    if (!(crit > r + kExponentMargin))
        throw std::invalid_argument("model: need r < (d+2)/d");
    if (!(q > crit + kExponentMargin))
        throw std::invalid_argument("model: need q > (d+2)/d");
    if (!(alpha > 0.0))
        throw std::invalid_argument("model: need alpha > 0");
    ModelParams p;
    p.d = d;
    p.q = q;
    p.r = r;
    p.alpha = alpha;
    p.a_const = (q - 1.0) * (q - r) / r;
    p.b_const = q * (q - r) / (r - 1.0);
    p.c_const = q * (q - 1.0) / (r * (r - 1.0));
    return p;
}

inline ModelParams with_alpha(const ModelParams& p, double alpha) {
    return make_model_params(p.d, p.q, p.r, alpha);
}

// ---- canonical (alpha = 1) nonlinearity ----------------------------------

inline double f1(const ModelParams& p, double t) {
    if (t < 0.0) throw std::domain_error("f1: t < 0");
    if (t <= 1.0) return -std::pow(t, p.q);
    return -p.a_const + p.b_const * t - p.c_const * std::pow(t, p.r);
}

inline double f1_prime(const ModelParams& p, double t) {
    if (t < 0.0) throw std::domain_error("f1_prime: t < 0");
    if (t <= 1.0) return -p.q * std::pow(t, p.q - 1.0);
    return p.b_const - p.c_const * p.r * std::pow(t, p.r - 1.0);
}

inline double f1_second(const ModelParams& p, double t) {
    if (t < 0.0) throw std::domain_error("f1_second: t < 0");
    if (t <= 1.0) return -p.q * (p.q - 1.0) * std::pow(t, p.q - 2.0);
    return -p.c_const * p.r * (p.r - 1.0) * std::pow(t, p.r - 2.0);
}

// ---- general alpha, via F_alpha(t) = alpha^q F1(t/alpha) ------------------

inline double f_alpha(const ModelParams& p, double t) {
    if (t < 0.0) throw std::domain_error("f_alpha: t < 0");
    return std::pow(p.alpha, p.q) * f1(p, t / p.alpha);
}

inline double f_alpha_prime(const ModelParams& p, double t) {
    if (t < 0.0) throw std::domain_error("f_alpha_prime: t < 0");
    return std::pow(p.alpha, p.q - 1.0) * f1_prime(p, t / p.alpha);
}

inline double f_alpha_second(const ModelParams& p, double t) {
    if (t < 0.0) throw std::domain_error("f_alpha_second: t < 0");
    return std::pow(p.alpha, p.q - 2.0) * f1_second(p, t / p.alpha);
}

// ---- Euler-Lagrange right-hand side ---------------------------------------

/// g_mu(t) = -t (F_alpha'(t^2) + mu); odd in t.  With alpha = 1 this is the
/// canonical EL nonlinearity of the mass-constrained problem.
inline double g_mu(const ModelParams& p, double mu, double t) {
    const double at = std::abs(t);
    const double v = -at * (f_alpha_prime(p, at * at) + mu);
    return t < 0.0 ? -v : v;
}

/// Antiderivative of g_mu with G_mu(0) = 0:
///   G_mu(t) = -F_alpha(t^2)/2 - mu t^2 / 2.
inline double big_g(const ModelParams& p, double mu, double t) {
    const double t2 = t * t;
    return -0.5 * f_alpha(p, t2) - 0.5 * mu * t2;
}

/// Zero-mass limit mu = 0 of g_mu / G_mu.
inline double g_star(const ModelParams& p, double t) { return g_mu(p, 0.0, t); }
inline double big_g_star(const ModelParams& p, double t) { return big_g(p, 0.0, t); }

// ---- correction term of the large-multiplier rescaling --------------------

/// E(alpha,t): the residual coupling the rescaled EL equation to the fixed
/// limit profile equation.  Vanishes identically for t >= alpha; value and
/// first derivative vanish at t = alpha.  Here `alpha` is the *rescaled*
/// threshold (b + mu)^{-1/(2(r-1))}, not the model threshold.
inline double e_correction(const ModelParams& p, double alpha, double t) {
    if (t < 0.0) throw std::domain_error("e_correction: t < 0");
    if (t >= alpha) return 0.0;
    const double q = p.q, r = p.r;
    return p.b_const * std::pow(alpha, 2.0 * (r - 1.0)) * t
         + q * std::pow(alpha, -2.0 * (q - r)) * std::pow(t, 2.0 * q - 1.0)
         - p.c_const * r * std::pow(t, 2.0 * r - 1.0);
}

inline double e_correction_dt(const ModelParams& p, double alpha, double t) {
    if (t < 0.0) throw std::domain_error("e_correction_dt: t < 0");
    if (t >= alpha) return 0.0;
    const double q = p.q, r = p.r;
    return p.b_const * std::pow(alpha, 2.0 * (r - 1.0))
         + q * (2.0 * q - 1.0) * std::pow(alpha, -2.0 * (q - r)) * std::pow(t, 2.0 * (q - 1.0))
         - p.c_const * r * (2.0 * r - 1.0) * std::pow(t, 2.0 * (r - 1.0));
}

// ---- exact scaling maps ----------------------------------------------------

struct ScaledPair {
    double alpha_prime = 1.0;  // threshold after the transform
    double lambda_prime = 1.0; // mass after the transform
    double energy_factor = 1.0;
    double beta = 1.0;         // coupling of the beta-form energy
};

/// Coupling form of the energy: E_alpha = alpha^{2/d} * Etilde_beta with
/// beta = alpha^{q - (d+2)/d}.  Preserves the mass and the Pauli constraint.
inline ScaledPair rescale_alpha_to_beta(const ModelParams& p) {
    ScaledPair s;
    s.alpha_prime = 1.0;
    s.lambda_prime = 1.0;
    s.beta = std::pow(p.alpha, p.q - (p.d + 2.0) / p.d);
    s.energy_factor = std::pow(p.alpha, 2.0 / p.d);
    return s;
}

/// Inverse of rescale_alpha_to_beta (threshold recovered from the coupling).
inline double beta_to_alpha(int d, double q, double beta) {
    return std::pow(beta, 1.0 / (q - (d + 2.0) / d));
}

struct BosonicScaling {
    ScaledPair pair;
    double profile_amplitude = 1.0; // L in u(x) = sqrt(L) s^{d/2} v(s x)
    double profile_dilation = 1.0;  // s
};

/// Mass scaling of the single-orbital problem:
///   J_alpha(lambda) = alpha^{q(1-d/2)+d/2} J_1(alpha^{(d/2)(q-(d+2)/d)} lambda),
/// minimizers mapping via u(x) = sqrt(L) s^{d/2} v(s x) with
/// L = alpha^{-(d/2)(q-(d+2)/d)}, s = alpha^{(q-1)/2}.
inline BosonicScaling bosonic_scaling_map(const ModelParams& p, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("bosonic_scaling_map: lambda <= 0");
    const double d = p.d, q = p.q, al = p.alpha;
    const double expo = (d / 2.0) * (q - (d + 2.0) / d);
    BosonicScaling m;
    m.pair.alpha_prime = 1.0;
    m.pair.lambda_prime = std::pow(al, expo) * lambda;
    m.pair.energy_factor = std::pow(al, q * (1.0 - d / 2.0) + d / 2.0);
    m.pair.beta = std::pow(al, q - (d + 2.0) / d);
    m.profile_amplitude = std::pow(al, -expo);
    m.profile_dilation = std::pow(al, (q - 1.0) / 2.0);
    return m;
}

// ---- serialization ---------------------------------------------------------

inline void to_json(nlohmann::json& j, const ModelParams& p) {
    j = nlohmann::json{{"d", p.d}, {"q", p.q}, {"r", p.r}, {"alpha", p.alpha}};
}

/// Derived constants are recomputed, never trusted from the file.
inline void from_json(const nlohmann::json& j, ModelParams& p) {
    p = make_model_params(j.at("d").get<int>(), j.at("q").get<double>(),
                          j.at("r").get<double>(), j.at("alpha").get<double>());
}

} // namespace concnls
