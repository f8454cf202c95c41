#pragma once

// Exterior calculus on the metric cone C = (0,∞) × Σ over a 6-dimensional
// coframe algebra Σ, for forms whose radial dependence is a homogeneous power
// times a polynomial in log r.  Every k-form term is kept in the canonical
// shape
//     r^λ (log r)^m ( r^{k-1} dr ∧ α + r^k β ),     α, β constant on Σ,
// so that d, *, d*, Δ, dilation, and radial integration act exactly on the
// stored (λ, m, α, β) data.  The conical G2 structure built from a strictly
// nearly Kähler link lives here, with its closedness certified as exact
// coefficient cancellation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "g2glue/errors.hpp"
#include "g2glue/g2_pointwise.hpp"
#include "g2glue/link_algebra.hpp"
#include "g2glue/nearly_kahler.hpp"
#include "g2glue/rational.hpp"

namespace g2glue {

inline constexpr int kMaxLogPower = 4;

// One canonical term r^λ (log r)^m (r^{k-1} dr∧α + r^k β).  For degree 0 the
// dr-slot is absent (α is a zero 0-form placeholder); for degree 7 the pure
// slot is absent (β is a zero 6-form placeholder).
struct ConeTerm {
    int degree = 0;
    Order lambda;
    int log_power = 0;
    Form alpha;  // InvariantForm(degree-1); zero placeholder when degree == 0
    Form beta;   // InvariantForm(min(degree,6)); zero placeholder when degree == 7

    ConeTerm(int k, Order lam, int m)
        : degree(k),
          lambda(lam),
          log_power(m),
          alpha(6, std::max(k - 1, 0)),
          beta(6, std::min(k, 6)) {
        if (k < 0 || k > 7) throw std::invalid_argument("ConeTerm: degree out of range");
        if (m < 0 || m > kMaxLogPower)
            throw LogObstruction("ConeTerm: log power " + std::to_string(m) +
                                 " outside [0," + std::to_string(kMaxLogPower) + "]");
    }

    bool is_zero() const {
        return (degree == 0 || !alpha.c.any()) && (degree == 7 || !beta.c.any());
    }
};

struct ConeForm {
    std::vector<ConeTerm> terms;

    ConeForm() = default;
    explicit ConeForm(ConeTerm t) { terms.push_back(std::move(t)); }

    // Canonical normal form: sorted by (degree, λ, m), like terms merged,
    // zero terms pruned.
    void normalize() {
        std::stable_sort(terms.begin(), terms.end(), [](const ConeTerm& a, const ConeTerm& b) {
            if (a.degree != b.degree) return a.degree < b.degree;
            if (a.lambda != b.lambda) return a.lambda < b.lambda;
            return a.log_power < b.log_power;
        });
        std::vector<ConeTerm> out;
        for (ConeTerm& t : terms) {
            if (!out.empty() && out.back().degree == t.degree &&
                out.back().lambda == t.lambda && out.back().log_power == t.log_power) {
                if (t.degree > 0) out.back().alpha += t.alpha;
                if (t.degree < 7) out.back().beta += t.beta;
            } else {
                out.push_back(std::move(t));
            }
        }
        terms.clear();
        for (ConeTerm& t : out)
            if (!t.is_zero()) terms.push_back(std::move(t));
    }

    ConeForm& operator+=(const ConeForm& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        normalize();
        return *this;
    }
    ConeForm operator+(const ConeForm& o) const {
        ConeForm r = *this;
        r += o;
        return r;
    }
    ConeForm operator*(double s) const {
        ConeForm r = *this;
        for (ConeTerm& t : r.terms) {
            t.alpha = t.alpha * s;
            t.beta = t.beta * s;
        }
        r.normalize();
        return r;
    }
    ConeForm operator-(const ConeForm& o) const { return *this + o * (-1.0); }

    bool is_zero() const {
        for (const ConeTerm& t : terms)
            if (!t.is_zero()) return false;
        return true;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const ConeTerm& t : terms) {
            if (t.degree > 0) m = std::max(m, t.alpha.c.cwiseAbs().maxCoeff());
            if (t.degree < 7) m = std::max(m, t.beta.c.cwiseAbs().maxCoeff());
        }
        return m;
    }
};

// Helper: term from pure link data (α may be omitted for degree 0).
inline ConeForm cone_term(int k, Order lam, const Form& alpha, const Form& beta,
                          int log_power = 0) {
    ConeTerm t(k, lam, log_power);
    if (k > 0) t.alpha = alpha;
    if (k < 7) t.beta = beta;
    ConeForm w(std::move(t));
    w.normalize();
    return w;
}

// d( r^λ L^m (r^{k-1} dr∧α + r^k β) )
//   = r^{λ+k-1} L^m dr∧((λ+k)β - d_Σα) + r^{λ+k} L^m d_Σβ
//     + m r^{λ+k-1} L^{m-1} dr∧β,                       L = log r.
inline ConeForm cone_d(const LinkAlgebra& alg, const ConeForm& w) {
    ConeForm out;
    for (const ConeTerm& t : w.terms) {
        const int k = t.degree;
        if (k >= 7) continue;  // top forms are closed
        ConeTerm r(k + 1, t.lambda - 1, t.log_power);
        const double lk = t.lambda.value() + k;
        r.alpha = t.beta * lk;
        if (k > 0) r.alpha = r.alpha - alg.d(t.alpha);
        if (k + 1 < 7) r.beta = alg.d(t.beta);
        out.terms.push_back(std::move(r));
        if (t.log_power > 0) {
            ConeTerm s(k + 1, t.lambda - 1, t.log_power - 1);
            s.alpha = t.beta * static_cast<double>(t.log_power);
            out.terms.push_back(std::move(s));
        }
    }
    out.normalize();
    return out;
}

// *( r^λ (r^{k-1} dr∧α + r^k β) ) = r^λ (r^{6-k} dr∧((-1)^k *_Σ β) + r^{7-k} *_Σ α);
// homogeneity order is preserved and log powers ride along untouched.
inline ConeForm cone_star(const LinkAlgebra& alg, const ConeForm& w) {
    ConeForm out;
    for (const ConeTerm& t : w.terms) {
        const int k = t.degree;
        ConeTerm r(7 - k, t.lambda, t.log_power);
        if (k < 7) {
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            r.alpha = alg.star(t.beta) * sgn;
        }
        if (k > 0) r.beta = alg.star(t.alpha);
        out.terms.push_back(std::move(r));
    }
    out.normalize();
    return out;
}

// d* = (-1)^k * d *  on k-forms of the 7-dimensional Riemannian cone
// (** = id in every degree).
inline ConeForm cone_codiff(const LinkAlgebra& alg, const ConeForm& w) {
    ConeForm out;
    for (const ConeTerm& t : w.terms) {
        ConeForm single(t);
        ConeForm r = cone_star(alg, cone_d(alg, cone_star(alg, single)));
        if (t.degree % 2 != 0) r = r * (-1.0);
        out += r;
    }
    out.normalize();
    return out;
}

inline ConeForm cone_laplacian(const LinkAlgebra& alg, const ConeForm& w) {
    return cone_codiff(alg, cone_d(alg, w)) + cone_d(alg, cone_codiff(alg, w));
}

// Pullback under (r,σ) ↦ (tr,σ): a term of order λ, degree k, log power m
// picks up t^{λ+k} and expands (log t + log r)^m binomially.
inline ConeForm dilate(const LinkAlgebra& /*alg*/, double t, const ConeForm& w) {
    if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
    const double lt = std::log(t);
    ConeForm out;
    for (const ConeTerm& trm : w.terms) {
        const double scale = std::pow(t, trm.lambda.value() + trm.degree);
        double binom = 1.0;
        for (int j = trm.log_power; j >= 0; --j) {
            // binom = C(m, j) (log t)^{m-j} accumulated from j = m downward
            ConeTerm r(trm.degree, trm.lambda, j);
            r.alpha = trm.alpha * (scale * binom);
            r.beta = trm.beta * (scale * binom);
            out.terms.push_back(std::move(r));
            binom *= lt * static_cast<double>(j) / static_cast<double>(trm.log_power - j + 1);
        }
    }
    out.normalize();
    return out;
}

enum class IntegrationEnd { zero, infinity };

// Radial primitive of a closed form: Ω(r) = ∫ (dr-slot) integrated from the
// chosen end, termwise.  For a closed input, cone_d(Ω) recovers the input
// exactly (β-slots are regenerated by the closedness relations).
inline ConeForm radial_primitive(const LinkAlgebra& alg, const ConeForm& w,
                                 IntegrationEnd end) {
    const double scale = std::max(1.0, w.max_abs_coeff());
    if (cone_d(alg, w).max_abs_coeff() > 1e-11 * scale)
        throw NotClosed("radial_primitive: input is not closed");
    for (const ConeTerm& t : w.terms) {
        const double a = t.lambda.value() + t.degree;
        if (t.lambda.exact() && t.lambda.num() + static_cast<std::int64_t>(t.degree) *
                                                     t.lambda.den() ==
                                    0)
            throw LogObstruction("radial_primitive: term with λ + k = 0 would integrate to a log");
        if (end == IntegrationEnd::zero && !(a > 0.0))
            throw RateOutOfRange("radial_primitive: λ + k ≤ 0 term cannot be integrated from 0");
        if (end == IntegrationEnd::infinity && !(a < 0.0))
            throw RateOutOfRange("radial_primitive: λ + k ≥ 0 term cannot be integrated from ∞");
    }
    ConeForm out;
    for (const ConeTerm& t : w.terms) {
        if (t.degree == 0) continue;  // no dr-slot in degree 0 (closed ⇒ constant ⇒ d-exact only if 0)
        const double a = t.lambda.value() + t.degree;
        // ∫ r^{a-1} (log r)^m dr = r^a Σ_{j≤m} (-1)^{m-j} (m!/j!) a^{j-m-1} (log r)^j
        double coeff = 1.0 / a;  // j = m
        for (int j = t.log_power; j >= 0; --j) {
            ConeTerm p(t.degree - 1, t.lambda + 1, j);
            p.beta = t.alpha * coeff;
            out.terms.push_back(std::move(p));
            coeff *= -static_cast<double>(j) / a;
        }
    }
    out.normalize();
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation and norms

// Evaluate at radius r in a g_C-orthonormal coframe (e^0..e^5 the
// orthonormalized link coframe scaled by r, e^6 = dr): each term contributes
// r^λ (log r)^m · (pullback β + (-1)^{deg α} pullback α ∧ e^6).
inline Form evaluate_at(const LinkAlgebra& alg, const ConeForm& w, int degree, double r) {
    const Eigen::MatrixXd T = nk_detail::orthonormal_coframe(alg.metric());
    const Exterior& E6 = ext6();
    Form out(7, degree);
    const double lr = std::log(r);
    const Exterior& E7 = ext7();
    for (const ConeTerm& t : w.terms) {
        if (t.degree != degree) continue;
        const double radial = std::pow(r, t.lambda.value()) * std::pow(lr, t.log_power);
        if (t.degree < 7) {
            const Form beta = E6.pullback(T, t.beta);
            for (int p = 0; p < E6.dim(beta.degree); ++p)
                out.c[E7.pos(E6.basis(beta.degree)[p])] += radial * beta.c[p];
        }
        if (t.degree > 0) {
            const Form alpha = E6.pullback(T, t.alpha);
            const double sgn = (alpha.degree % 2 == 0) ? 1.0 : -1.0;
            for (int p = 0; p < E6.dim(alpha.degree); ++p)
                out.c[E7.pos(E6.basis(alpha.degree)[p] | (1u << 6))] += radial * sgn * alpha.c[p];
        }
    }
    return out;
}

// Pointwise cone norm at radius r: √(Σ over unit-coframe coefficients²) with
// the r^λ (log r)^m radial factors attached per term.
inline double pointwise_norm(const LinkAlgebra& alg, const ConeForm& w, double r) {
    double sq = 0.0;
    for (int k = 0; k <= 7; ++k) {
        bool has = false;
        for (const ConeTerm& t : w.terms) has = has || t.degree == k;
        if (!has) continue;
        sq += evaluate_at(alg, w, k, r).c.squaredNorm();
    }
    return std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// The conical G2 structure of a strictly nearly Kähler link

struct ConeG2 {
    LinkAlgebra link;
    SU3Structure nk;
    ConeForm phi_c;  // r³ ReΩ − r² dr∧ω          (degree 3, order 0)
    ConeForm psi_c;  // −r³ dr∧ImΩ − r⁴ ω²/2      (degree 4, order 0)
};

inline ConeG2 build_cone_g2(const LinkAlgebra& alg, const SU3Structure& nk) {
    const Exterior& E = ext6();
    const Form om2 = E.wedge(nk.omega, nk.omega);
    // Structure-equation residuals (these are bit-exact for solve_nk output).
    const double r1 = (alg.d(nk.omega).c + nk.re_omega3.c * 3.0).lpNorm<Eigen::Infinity>();
    const double r2 = (alg.d(nk.im_omega3).c - om2.c * 2.0).lpNorm<Eigen::Infinity>();
    const double r3 = (alg.star(nk.re_omega3) - nk.im_omega3).c.lpNorm<Eigen::Infinity>();
    if (std::max({r1, r2, r3}) > 1e-10)
        throw NKViolation("build_cone_g2: nearly Kähler residuals exceed 1e-10");

    ConeG2 cone{alg, nk, {}, {}};
    cone.phi_c = cone_term(3, Order(0), nk.omega * (-1.0), nk.re_omega3);
    cone.psi_c = cone_term(4, Order(0), nk.im_omega3 * (-1.0), om2 * (-0.5));

    if (!cone_d(alg, cone.phi_c).is_zero())
        throw NKViolation("build_cone_g2: dφ_C does not cancel exactly");
    if (!cone_d(alg, cone.psi_c).is_zero())
        throw NKViolation("build_cone_g2: dψ_C does not cancel exactly");
    if ((cone_star(alg, cone.phi_c) - cone.psi_c).max_abs_coeff() > 1e-12)
        throw NKViolation("build_cone_g2: *φ_C ≠ ψ_C as term data");
    return cone;
}

}  // namespace g2glue
