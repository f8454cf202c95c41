#pragma once

// Scaling analysis of the gluing torsion: radial magnitude envelopes for the
// interpolation terms, region-wise C⁰ / L² / L¹⁴ norms of the torsion
// measure χ_s across a grid of neck scales s, log-log exponent fitting, the
// (γ, κ) feasibility region, and the existence-theorem hypothesis gate.
// Envelope constants are 1 throughout: only the exponents are falsifiable.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "g2glue/errors.hpp"

namespace g2glue {

struct GlueParams {
    double mu = 1.0;          // singularity rate μ > 0
    double nu = -4.0;         // AC rate ν ≤ -3
    double nu_prime = -4.0;   // residual rate ν′
    double delta = 0.2;       // δ ∈ (0, μ), δ < (1-γ)/γ
    double epsilon = 0.5;     // neck outer radius ε ∈ (0,1)
    double R = 2.0;           // AC inner radius R > 1 (R′ = 2R)
    double gamma = 0.8;       // neck exponent γ ∈ (0,1)
    double kappa = 0.1;       // decay margin κ ≥ 0

    double R_prime() const { return 2.0 * R; }

    void validate(bool strict_delta = true) const {
        if (!(mu > 0.0)) throw std::invalid_argument("GlueParams: μ must be positive");
        if (!(nu <= -3.0)) throw std::invalid_argument("GlueParams: ν must be ≤ -3");
        if (!(delta > 0.0)) throw std::invalid_argument("GlueParams: δ must be positive");
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("GlueParams: γ must lie in (0,1)");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("GlueParams: ε must lie in (0,1)");
        if (!(R > 1.0)) throw std::invalid_argument("GlueParams: R must exceed 1");
        if (!(kappa >= 0.0)) throw std::invalid_argument("GlueParams: κ must be ≥ 0");
        if (!(delta < mu)) throw std::invalid_argument("GlueParams: need δ < μ");
        if (strict_delta && !(delta < (1.0 - gamma) / gamma))
            throw std::invalid_argument("GlueParams: need δ < (1-γ)/γ");
    }

    // s R′ < s^γ < 2 s^γ < ε
    bool admissible(double s) const {
        if (!(s > 0.0 && s < 1.0)) return false;
        const double sg = std::pow(s, gamma);
        return s * R_prime() < sg && 2.0 * sg < epsilon;
    }
};

// ---------------------------------------------------------------------------
// Cutoff

struct CutoffValue {
    double value;   // u_s(r)
    double dr;      // |d/dr u_s|
    double dr2;     // |d²/dr² u_s|
};

// Quintic smoothstep u(t) = 6τ⁵ - 15τ⁴ + 10τ³ (τ = t-1) on [1,2], with
// u_s(r) = u(s^{-γ} r); C² at the joints, sup|u′| = 15/8, so
// sup|d/dr u_s| = (15/8) s^{-γ}.
inline CutoffValue cutoff_u(double r, double s, double gamma) {
    if (!(r > 0.0)) throw std::invalid_argument("cutoff_u: r must be positive");
    const double sg = std::pow(s, -gamma);
    const double t = sg * r;
    CutoffValue out{0.0, 0.0, 0.0};
    if (t <= 1.0) return out;
    if (t >= 2.0) {
        out.value = 1.0;
        return out;
    }
    const double tau = t - 1.0;
    out.value = ((6.0 * tau - 15.0) * tau + 10.0) * tau * tau * tau;
    out.dr = std::fabs(30.0 * tau * tau * (tau - 1.0) * (tau - 1.0)) * sg;
    out.dr2 = std::fabs(60.0 * tau * (2.0 * tau - 1.0) * (tau - 1.0)) * sg * sg;
    return out;
}

// ---------------------------------------------------------------------------
// Envelopes

// Power-law magnitude bound c·r^a; taking j derivatives lowers the exponent
// to a - j (the derivative ledger).
struct Envelope {
    double coeff = 0.0;
    double exponent = 0.0;
    double at(double r, int deriv = 0) const {
        return coeff * std::pow(r, exponent - deriv);
    }
};

inline std::map<std::string, Envelope> build_envelopes(const GlueParams& p, double s,
                                                       bool strict_delta = true) {
    p.validate(strict_delta);
    if (!p.admissible(s))
        throw InadmissibleScale("build_envelopes: s violates sR' < s^γ < 2s^γ < ε");
    std::map<std::string, Envelope> env;
    env["alpha"] = {1.0, p.mu + 1.0};
    env["A"] = {1.0, -2.0 + p.delta};
    env["beta"] = {1.0, p.mu + 1.0};
    env["B"] = {1.0, -3.0 + p.delta};
    env["E"] = {1.0, -2.0 + p.delta};
    env["zeta_s"] = {std::pow(s, -p.nu_prime), p.nu_prime + 1.0};
    env["theta_s"] = {std::pow(s, -p.nu_prime), p.nu_prime + 1.0};
    env["xi"] = {1.0, -3.0};
    env["eta"] = {1.0, -4.0};
    return env;
}

// ---------------------------------------------------------------------------
// χ_s region model

enum class Region { inner_K, overlap, inner_annulus, outer };

inline std::string region_name(Region r) {
    switch (r) {
        case Region::inner_K: return "inner_K";
        case Region::overlap: return "overlap";
        case Region::inner_annulus: return "inner_annulus";
        default: return "outer";
    }
}

namespace glue_detail {

// |χ_s|(r) and the envelope of its first derivative, per region.
struct ChiModel {
    GlueParams p;
    double s;
    std::map<std::string, Envelope> env;

    ChiModel(const GlueParams& params, double scale, bool strict_delta = true)
        : p(params), s(scale), env(build_envelopes(params, scale, strict_delta)) {}

    double s3() const { return s * s * s; }
    double s4() const { return s * s * s * s; }

    // |dρ|, |dτ| on the overlap and their derivative envelopes.
    void overlap_pieces(double r, double& drho, double& dtau, double& drho1,
                        double& dtau1) const {
        const CutoffValue u = cutoff_u(r, s, p.gamma);
        const double om = 1.0 - u.value;
        auto F = [&](const char* n, int j) { return env.at(n).at(r, j); };
        const double cs = F("alpha", 0) + s3() * F("A", 0) + F("zeta_s", 0);
        const double cs1 = F("alpha", 1) + s3() * F("A", 1) + F("zeta_s", 1);
        const double cs2 = F("alpha", 2) + s3() * F("A", 2) + F("zeta_s", 2);
        drho = u.dr * cs + u.value * (F("alpha", 1) + s3() * F("A", 1)) + om * F("zeta_s", 1);
        drho1 = u.dr2 * cs + u.dr * cs1 + u.dr * (F("alpha", 1) + s3() * F("A", 1)) +
                u.value * (F("alpha", 2) + s3() * F("A", 2)) + u.dr * F("zeta_s", 1) +
                om * F("zeta_s", 2);
        (void)cs2;
        const double dt = F("beta", 0) + s4() * F("B", 0) + s3() * F("E", 0) +
                          F("theta_s", 0);
        const double dt1 = F("beta", 1) + s4() * F("B", 1) + s3() * F("E", 1) +
                           F("theta_s", 1);
        dtau = u.dr * dt + u.value * (F("beta", 1) + s4() * F("B", 1) + s3() * F("E", 1)) +
               om * F("theta_s", 1);
        dtau1 = u.dr2 * dt + u.dr * dt1 +
                u.dr * (F("beta", 1) + s4() * F("B", 1) + s3() * F("E", 1)) +
                u.value * (F("beta", 2) + s4() * F("B", 2) + s3() * F("E", 2)) +
                u.dr * F("theta_s", 1) + om * F("theta_s", 2);
    }

    double chi(Region reg, double r) const {
        switch (reg) {
            case Region::inner_K: {
                const double lin = s4();
                const double quad = s4() + s3();
                return lin + quad * quad;
            }
            case Region::overlap: {
                double drho, dtau, drho1, dtau1;
                overlap_pieces(r, drho, dtau, drho1, dtau1);
                const double eta = env.at("eta").at(r), xi = env.at("xi").at(r);
                const double q = s4() * eta + s3() * xi + dtau;
                return drho + s4() * eta + q * q;
            }
            case Region::inner_annulus: {
                const double lin = s4() * std::pow(r, -4.0);
                const double quad = s4() * std::pow(r, -4.0) + s3() * std::pow(r, -3.0);
                return lin + quad * quad;
            }
            default:
                return 0.0;
        }
    }

    // Envelope of |∇χ_s| (one more derivative per factor, product rule).
    double chi_grad(Region reg, double r) const {
        switch (reg) {
            case Region::inner_K: {
                const double lin = s4();
                const double quad = s4() + s3();
                return lin + quad * quad;  // compact piece: O(1) geometry, same size
            }
            case Region::overlap: {
                double drho, dtau, drho1, dtau1;
                overlap_pieces(r, drho, dtau, drho1, dtau1);
                const double eta = env.at("eta").at(r), eta1 = env.at("eta").at(r, 1);
                const double xi = env.at("xi").at(r), xi1 = env.at("xi").at(r, 1);
                const double q = s4() * eta + s3() * xi + dtau;
                const double q1 = s4() * eta1 + s3() * xi1 + dtau1;
                return drho1 + s4() * eta1 + 2.0 * q * q1;
            }
            case Region::inner_annulus: {
                const double lin = s4() * std::pow(r, -5.0);
                const double quad = s4() * std::pow(r, -4.0) + s3() * std::pow(r, -3.0);
                const double quad1 = s4() * std::pow(r, -5.0) + s3() * std::pow(r, -4.0);
                return lin + 2.0 * quad * quad1;
            }
            default:
                return 0.0;
        }
    }
};

// Adaptive Simpson on [a,b] (log-substituted by the caller when needed).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <=
                          15.0 * tol * (std::fabs(left + right) + 1e-300))
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol, depth - 1);
}

// ∫_a^b f(r) dr with relative tolerance, in the substitution r = e^x so the
// many-decade radial ranges are resolved uniformly.
inline double integrate_radial(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-8) {
    if (!(b > a)) return 0.0;
    auto g = [&](double x) {
        const double r = std::exp(x);
        return f(r) * r;
    };
    const double xa = std::log(a), xb = std::log(b);
    const double m = 0.5 * (xa + xb);
    const double fa = g(xa), fm = g(m), fb = g(xb);
    const double whole = (xb - xa) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(g, xa, xb, fa, fm, fb, whole, rel_tol, 40);
}

}  // namespace glue_detail

struct NormReport {
    double s;
    Region region;
    double c0;
    double l2;
    double l14;  // L¹⁴ norm of the ∇χ envelope (the d* bound)
};

inline std::vector<NormReport> chi_norm_scan(const GlueParams& p,
                                             const std::vector<double>& s_list,
                                             bool strict_delta = true) {
    using glue_detail::ChiModel;
    using glue_detail::integrate_radial;
    std::vector<NormReport> out;
    for (double s : s_list) {
        ChiModel model(p, s, strict_delta);
        const double sg = std::pow(s, p.gamma);
        const std::pair<double, double> bounds[] = {
            {1.0, 1.0},                 // inner_K: abstract unit-measure compact piece
            {sg, 2.0 * sg},             // overlap
            {2.0 * sg, p.epsilon},      // inner annulus
            {p.epsilon, 1.0},           // outer
        };
        const Region regs[] = {Region::inner_K, Region::overlap, Region::inner_annulus,
                               Region::outer};
        for (int i = 0; i < 4; ++i) {
            NormReport rep{s, regs[i], 0.0, 0.0, 0.0};
            if (regs[i] == Region::inner_K) {
                rep.c0 = model.chi(regs[i], 1.0);
                rep.l2 = rep.c0;  // unit measure
                rep.l14 = model.chi_grad(regs[i], 1.0);
            } else if (regs[i] != Region::outer) {
                const double a = bounds[i].first, b = bounds[i].second;
                // C⁰ by dense log-spaced sampling
                const int nsamp = 257;
                double c0 = 0.0, gmax = 0.0;
                for (int j = 0; j < nsamp; ++j) {
                    const double r = a * std::pow(b / a, static_cast<double>(j) / (nsamp - 1));
                    c0 = std::max(c0, model.chi(regs[i], r));
                    gmax = std::max(gmax, model.chi_grad(regs[i], r));
                }
                rep.c0 = c0;
                rep.l2 = std::sqrt(integrate_radial(
                    [&](double r) {
                        const double v = model.chi(regs[i], r);
                        return v * v * std::pow(r, 6.0);
                    },
                    a, b));
                // scale out the max so the 14th power cannot underflow
                if (gmax > 0.0) {
                    const double integral = integrate_radial(
                        [&](double r) {
                            const double v = model.chi_grad(regs[i], r) / gmax;
                            return std::pow(v, 14.0) * std::pow(r, 6.0);
                        },
                        a, b);
                    rep.l14 = gmax * std::pow(integral, 1.0 / 14.0);
                }
            }
            out.push_back(rep);
        }
    }
    return out;
}

// Combine the per-region reports of a single s into total norms
// (C⁰: max; L²/L¹⁴: p-norm combination).
inline NormReport combine_regions(const std::vector<NormReport>& reports, double s) {
    NormReport tot{s, Region::outer, 0.0, 0.0, 0.0};
    double l2sq = 0.0, l14p = 0.0, l14max = 0.0;
    for (const NormReport& r : reports) {
        if (r.s != s) continue;
        tot.c0 = std::max(tot.c0, r.c0);
        l2sq += r.l2 * r.l2;
        l14max = std::max(l14max, r.l14);
    }
    for (const NormReport& r : reports) {
        if (r.s != s || l14max == 0.0) continue;
        l14p += std::pow(r.l14 / l14max, 14.0);
    }
    tot.l2 = std::sqrt(l2sq);
    tot.l14 = l14max == 0.0 ? 0.0 : l14max * std::pow(l14p, 1.0 / 14.0);
    return tot;
}

// ---------------------------------------------------------------------------
// Exponent fitting

struct ExponentFit {
    double slope;
    double width;  // max |residual| of log(value) against the fit
};

inline ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 8)
        throw std::invalid_argument("fit_exponent: need at least 8 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [s, v] : points) {
        if (!(v > 0.0)) throw NonPositiveValue("fit_exponent: nonpositive value");
        if (!(s > 0.0)) throw NonPositiveValue("fit_exponent: nonpositive scale");
        const double x = std::log(s), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double width = 0.0;
    for (const auto& [s, v] : points)
        width = std::max(width, std::fabs(std::log(v) - slope * std::log(s) - intercept));
    return {slope, width};
}

// Predicted total-norm exponents: C⁰ slope min(γμ, -ν′(1-γ), 3(1-γ)+δγ);
// L² adds (7/2)γ; the ∇-envelope L¹⁴ subtracts (1/2)γ.
struct PredictedExponents {
    double c0;
    double l2;
    double l14;
};

inline PredictedExponents predicted_exponents(const GlueParams& p) {
    const double e0 = std::min({p.gamma * p.mu, -p.nu_prime * (1.0 - p.gamma),
                                3.0 * (1.0 - p.gamma) + p.delta * p.gamma});
    return {e0, e0 + 3.5 * p.gamma, e0 - 0.5 * p.gamma};
}

// Full scan driver: geometric s-grid (12 points per decade) clipped to the
// admissible scales, with the window sliding toward small s (a decade at a
// time, floor 1e-8) while mixed-power contamination keeps any fitted slope
// more than `slope_tol` away from its prediction.
struct GlueScanResult {
    std::vector<double> s_grid;
    std::vector<NormReport> reports;  // per-region reports for the final grid
    ExponentFit c0, l2, l14;
    PredictedExponents predicted;
    double window_lo, window_hi;
    bool converged;
};

inline std::vector<double> admissible_grid(const GlueParams& p, double lo, double hi,
                                           int per_decade = 12) {
    std::vector<double> g;
    const double f = std::pow(10.0, 1.0 / per_decade);
    for (double s = lo; s <= hi * 1.0000001; s *= f)
        if (p.admissible(s)) g.push_back(s);
    return g;
}

inline GlueScanResult glue_scan(const GlueParams& p, double lo = 1e-4, double hi = 1e-1,
                                double slope_tol = 0.05) {
    p.validate();
    GlueScanResult res;
    res.predicted = predicted_exponents(p);
    double wlo = lo, whi = hi;
    while (true) {
        res.s_grid = admissible_grid(p, wlo, whi);
        if (res.s_grid.size() < 8) {
            // admissibility clipped the top; slide further down
            if (wlo <= 1.0000001e-8)
                throw InadmissibleScale("glue_scan: no admissible window with ≥ 8 points");
            wlo /= 10.0;
            whi /= 10.0;
            continue;
        }
        res.reports = chi_norm_scan(p, res.s_grid);
        std::vector<std::pair<double, double>> pc0, pl2, pl14;
        for (double s : res.s_grid) {
            const NormReport t = combine_regions(res.reports, s);
            pc0.emplace_back(s, t.c0);
            pl2.emplace_back(s, t.l2);
            pl14.emplace_back(s, t.l14);
        }
        res.c0 = fit_exponent(pc0);
        res.l2 = fit_exponent(pl2);
        res.l14 = fit_exponent(pl14);
        res.window_lo = wlo;
        res.window_hi = whi;
        res.converged = std::fabs(res.c0.slope - res.predicted.c0) <= slope_tol &&
                        std::fabs(res.l2.slope - res.predicted.l2) <= slope_tol &&
                        std::fabs(res.l14.slope - res.predicted.l14) <= slope_tol;
        if (res.converged || wlo <= 1.0000001e-8) return res;
        wlo /= 10.0;
        whi = wlo * 10.0;  // one-decade sliding window once contamination shows
    }
}

// ---------------------------------------------------------------------------
// Feasibility

struct FeasibilityRegion {
    double mu;
    double nu_prime;
    double delta;
    double kappa_max;  // supremum (open): min(δ, 1/2, μ)

    // Boundary curves of the (γ,κ) region, as closed forms in κ.
    double gamma_lb_mu(double kappa) const { return (3.5 + kappa) / (3.5 + mu); }
    double gamma_lb_nu(double kappa) const {
        const double d = 3.5 + nu_prime;
        if (d == 0.0) return kappa > 0.0 ? HUGE_VAL : 1.0;
        return 1.0 + kappa / d;
    }
    double gamma_lb_delta(double kappa) const { return (1.0 + 2.0 * kappa) / (1.0 + 2.0 * delta); }

    // The ν′ curve 1 + κ/(7/2+ν′) is written over a negative divisor (7/2+ν′ < 0
    // for admissible ν′): it pins a cap on κ — the curve stays positive only for
    // κ < −(7/2+ν′) (= 1/2 at ν′ = −4) — while the γ-interval itself is bounded
    // below by the μ and δ curves and above by 1.
    double kappa_cap_nu() const {
        const double d = 3.5 + nu_prime;
        return d < 0.0 ? -d : 0.0;
    }
    double gamma_lb(double kappa) const {
        return std::max(gamma_lb_mu(kappa), gamma_lb_delta(kappa));
    }
    bool kappa_feasible(double kappa) const {
        return kappa > 0.0 && kappa < kappa_cap_nu() && kappa < mu && kappa < delta;
    }
    bool feasible(double gamma, double kappa) const {
        return kappa_feasible(kappa) && gamma > 0.0 && gamma < 1.0 && gamma >= gamma_lb(kappa);
    }
};

inline FeasibilityRegion feasibility_region(double mu_min, double nu_prime, double delta) {
    if (!(mu_min > 0.0)) throw std::invalid_argument("feasibility_region: μ must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("feasibility_region: δ must be positive");
    return {mu_min, nu_prime, delta, std::min({delta, 0.5, mu_min})};
}

// ---------------------------------------------------------------------------
// Existence-theorem hypothesis gate

struct JoyceVerdict {
    bool c0_ok;
    bool l2_ok;
    bool l14_ok;
    bool injectivity_ok;
    bool curvature_ok;
    double injectivity;  // modeled I(g_s)
    double curvature;    // modeled ‖R(g_s)‖
    bool all() const { return c0_ok && l2_ok && l14_ok && injectivity_ok && curvature_ok; }
};

struct RegionConstants {
    double inner = 1.0;
    double overlap = 1.0;
    double outer = 1.0;
};

inline JoyceVerdict joyce_gate(const GlueParams& p, double s, double D1, double D2, double D3,
                               const NormReport& fitted,
                               const RegionConstants& C = RegionConstants{}) {
    p.validate();
    JoyceVerdict v{};
    v.c0_ok = fitted.c0 <= D1 * std::pow(s, p.kappa);
    v.l2_ok = fitted.l2 <= D1 * std::pow(s, 3.5 + p.kappa);
    v.l14_ok = fitted.l14 <= D1 * std::pow(s, -0.5 + p.kappa);
    v.injectivity =
        std::min({C.inner, C.overlap * std::pow(s, p.gamma), C.outer * s});
    v.curvature =
        std::max({C.inner, C.overlap * std::pow(s, -2.0 * p.gamma), C.outer * std::pow(s, -2.0)});
    v.injectivity_ok = v.injectivity >= D2 * s;
    v.curvature_ok = v.curvature <= D3 * std::pow(s, -2.0);
    return v;
}

// Locate by bisection the threshold s₀ below which the gate passes, using
// model norms value = s^{predicted exponent} with unit constants.
inline double joyce_threshold(const GlueParams& p, double D1, double D2, double D3,
                              double s_lo = 1e-8, double s_hi = 0.5,
                              const RegionConstants& C = RegionConstants{}) {
    const PredictedExponents e = predicted_exponents(p);
    auto pass = [&](double s) {
        NormReport n{s, Region::outer, std::pow(s, e.c0), std::pow(s, e.l2),
                     std::pow(s, e.l14)};
        return joyce_gate(p, s, D1, D2, D3, n, C).all();
    };
    if (!pass(s_lo)) return 0.0;  // no threshold in range
    if (pass(s_hi)) return s_hi;
    double lo = s_lo, hi = s_hi;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double m = std::sqrt(lo * hi);
        (pass(m) ? lo : hi) = m;
    }
    return lo;
}

}  // namespace g2glue
