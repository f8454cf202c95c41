#pragma once

// Pointwise linear/multilinear algebra of G2 structures on R^7: metric from a
// positive 3-form, Hodge duality, the nonlinear map Θ and its Newton inverse,
// the three type projectors in degrees 3 and 4, the J map, and the quadratic
// remainders F and G.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "g2glue/errors.hpp"
#include "g2glue/exterior.hpp"

namespace g2glue {

inline const Exterior& ext7() {
    static const Exterior e(7);
    return e;
}

struct Metric7 {
    Eigen::Matrix<double, 7, 7> g;  // metric on tangent vectors
    double volume = 1.0;            // |vol| coefficient against e^{0...6}
    int orientation = 1;            // sign of the volume form

    double signed_volume() const { return orientation * volume; }
};

// --- basic form helpers -----------------------------------------------------

inline Form form7(int k) { return Form(7, k); }

inline Form hodge_star(const Metric7& m, const Form& w) {
    const Eigen::MatrixXd h = m.g.inverse();
    return ext7().star(w, h, m.signed_volume());
}

inline double form_norm(const Metric7& m, const Form& w) {
    const Eigen::MatrixXd h = m.g.inverse();
    const Eigen::MatrixXd G = ext7().gram(w.degree, h);
    return std::sqrt(std::max(0.0, w.c.dot(G * w.c)));
}

// --- metric from a positive 3-form ------------------------------------------

// The bilinear density B(u,v) = (u ⌟ φ) ∧ (v ⌟ φ) ∧ φ read against e^{0...6}.
inline Eigen::Matrix<double, 7, 7> bilinear_density(const Form& phi) {
    const Exterior& E = ext7();
    Eigen::Matrix<double, 7, 7> B;
    std::vector<Form> contr;
    contr.reserve(7);
    for (int i = 0; i < 7; ++i) contr.push_back(E.contract_basis(i, phi));
    for (int i = 0; i < 7; ++i) {
        for (int j = i; j < 7; ++j) {
            const Form top = E.wedge(E.wedge(contr[i], contr[j]), phi);
            B(i, j) = top.c[0];
            B(j, i) = top.c[0];
        }
    }
    return B;
}

// Returns the metric, volume, and orientation induced by φ, normalized so the
// standard 3-form maps to the identity.  In the sign convention fixed by the
// cone cross-check (see standard_phi0), A = -B satisfies A = 6 g √(det g)
// against the induced orientation, hence
//   g = 6^{-2/9} |det A|^{-1/9} · sign(det A) · A,
//   vol = 6^{-7/9} |det A|^{1/9},  orientation = sign(det A);
// the signed handling accepts 3-forms positive for either orientation.
inline Metric7 metric_from_3form(const Form& phi) {
    if (phi.n != 7 || phi.degree != 3)
        throw std::invalid_argument("metric_from_3form: expects a 3-form on R^7");
    const Eigen::Matrix<double, 7, 7> A = -bilinear_density(phi);
    const double detA = A.determinant();
    if (detA == 0.0) throw NotPositive("metric_from_3form: degenerate 3-form");
    const int sign = detA > 0 ? 1 : -1;

    Metric7 m;
    m.g = std::pow(6.0, -2.0 / 9.0) * std::pow(std::fabs(detA), -1.0 / 9.0) * sign * A;
    m.volume = std::pow(6.0, -7.0 / 9.0) * std::pow(std::fabs(detA), 1.0 / 9.0);
    m.orientation = sign;

    // Positivity gate: the derived bilinear form must be definite with
    // eigenvalues bounded away from zero.
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> es(m.g);
    if (es.eigenvalues().minCoeff() <= 1e-10)
        throw NotPositive("metric_from_3form: derived bilinear form is not positive-definite");
    return m;
}

// --- the standard structure and Θ -------------------------------------------

// φ0 = Re Ω0 - dr ∧ ω0 for the flat SU(3) model (ω0, Ω0) on R^6 with the
// seventh coordinate playing the radial role; its derived metric is the
// identity and its orientation is positive.  Indices below are 0-based.
inline Form standard_phi0() {
    const Exterior& E = ext7();
    Form phi = form7(3);
    auto set = [&](int a, int b, int c, double v) {
        phi.c[E.pos((1u << a) | (1u << b) | (1u << c))] = v;
    };
    // Re Ω0 with Ω0 = (e0 + i e1) ∧ (e2 + i e3) ∧ (e4 + i e5)
    set(0, 2, 4, 1.0);
    set(0, 3, 5, -1.0);
    set(1, 2, 5, -1.0);
    set(1, 3, 4, -1.0);
    // -e6 ∧ ω0 with ω0 = e01 + e23 + e45
    set(0, 1, 6, -1.0);
    set(2, 3, 6, -1.0);
    set(4, 5, 6, -1.0);
    return phi;
}

inline Form theta(const Form& phi) { return hodge_star(metric_from_3form(phi), phi); }

struct G2Structure {
    Form phi;
    Metric7 metric;
    Form psi;

    static G2Structure from_phi(const Form& phi) {
        G2Structure s;
        s.phi = phi;
        s.metric = metric_from_3form(phi);
        s.psi = hodge_star(s.metric, phi);
        return s;
    }
};

inline G2Structure standard_g2() { return G2Structure::from_phi(standard_phi0()); }

// --- type projections --------------------------------------------------------

// Spectral projectors on Λ³, clustered into the three eigenspaces of
// dimensions (1, 7, 27).  The wedge operator *(φ ∧ *(φ ∧ ξ)) factors through
// Λ⁶ and therefore annihilates both Λ³₁ and Λ³₂₇ (rank ≤ 7); it is augmented
// with the rank-one detector φ·*(ψ ∧ ξ) so the three types acquire distinct
// eigenvalues.  Built numerically instead of from hard-coded component
// formulas so the construction is immune to sign convention drift;
// eigenvalues themselves are derived artifacts and only the dimensions
// (1, 7, 27) are contractual.
struct TypeProjectors {
    // Projector matrices acting on lexicographic coefficient stacks.
    Eigen::MatrixXd p1, p7, p27;  // Λ³ projectors (35×35)
};

inline TypeProjectors make_projectors(const G2Structure& s) {
    const Exterior& E = ext7();
    const int d3 = E.dim(3);
    Eigen::MatrixXd T(d3, d3);
    for (int j = 0; j < d3; ++j) {
        Form e = form7(3);
        e.c[j] = 1.0;
        Form t = hodge_star(s.metric, E.wedge(s.phi, hodge_star(s.metric, E.wedge(s.phi, e))));
        const Form top = E.wedge(s.psi, e);  // ψ ∧ ξ, a multiple of vol
        t += s.phi * (top.c[0] / s.metric.signed_volume());
        T.col(j) = t.c;
    }
    // T is self-adjoint for the Λ³ inner product; symmetrize in orthonormal
    // coordinates y = L^T x where G = L L^T is the Gram factorization.
    const Eigen::MatrixXd G = E.gram(3, s.metric.g.inverse());
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::MatrixXd Lt = L.transpose();
    Eigen::MatrixXd Ts = Lt * T * Lt.fullPivLu().inverse();
    Ts = 0.5 * (Ts + Ts.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ts);
    const Eigen::VectorXd ev = es.eigenvalues();

    // Cluster the sorted eigenvalues into three groups separated by gaps.
    std::vector<std::pair<int, int>> clusters;  // [begin, end)
    int begin = 0;
    for (int i = 1; i <= d3; ++i) {
        if (i == d3 || ev[i] - ev[i - 1] > 1e-6) {
            clusters.emplace_back(begin, i);
            begin = i;
        }
    }
    if (clusters.size() != 3)
        throw std::runtime_error("make_projectors: eigenvalues did not cluster into three groups");

    TypeProjectors P;
    auto proj = [&](int b, int e2) {
        const Eigen::MatrixXd V = es.eigenvectors().middleCols(b, e2 - b);
        // Back to coefficient coordinates: x = L^{-T} y.
        const Eigen::MatrixXd W = Lt.fullPivLu().solve(V.eval());
        // Projector x ↦ W (W^T G x): idempotent and G-orthogonal.
        return (W * (V.transpose() * Lt)).eval();
    };
    Eigen::MatrixXd mats[3];
    int dims[3];
    for (int c = 0; c < 3; ++c) {
        mats[c] = proj(clusters[c].first, clusters[c].second);
        dims[c] = clusters[c].second - clusters[c].first;
    }
    for (int c = 0; c < 3; ++c) {
        if (dims[c] == 1) P.p1 = mats[c];
        else if (dims[c] == 7) P.p7 = mats[c];
        else if (dims[c] == 27) P.p27 = mats[c];
        else throw std::runtime_error("make_projectors: unexpected eigenspace dimension");
    }
    if (P.p1.size() == 0 || P.p7.size() == 0 || P.p27.size() == 0)
        throw std::runtime_error("make_projectors: missing (1,7,27) cluster");
    return P;
}

struct Split3 {
    Form pi1, pi7, pi27;
};

inline Split3 project3_with(const TypeProjectors& P, const Form& xi) {
    Split3 r{form7(3), form7(3), form7(3)};
    r.pi1.c = P.p1 * xi.c;
    r.pi7.c = P.p7 * xi.c;
    r.pi27.c = P.p27 * xi.c;
    return r;
}

inline Split3 project3(const G2Structure& s, const Form& xi) {
    return project3_with(make_projectors(s), xi);
}

// Degree-4 projections via duality: Λ⁴_l = *Λ³_l.
inline Split3 project4_with(const G2Structure& s, const TypeProjectors& P, const Form& eta) {
    const Split3 q = project3_with(P, hodge_star(s.metric, eta));
    Split3 r;
    r.pi1 = hodge_star(s.metric, q.pi1);
    r.pi7 = hodge_star(s.metric, q.pi7);
    r.pi27 = hodge_star(s.metric, q.pi27);
    return r;
}

inline Split3 project4(const G2Structure& s, const Form& eta) {
    return project4_with(s, make_projectors(s), eta);
}

// --- linearization, J, and Newton inverse ------------------------------------

// Linearization of Θ at φ: ξ ↦ *((4/3)π₁ξ + π₇ξ − π₂₇ξ).
inline Form theta_linearization_with(const G2Structure& s, const TypeProjectors& P,
                                     const Form& xi) {
    const Split3 p = project3_with(P, xi);
    return hodge_star(s.metric, p.pi1 * (4.0 / 3.0) + p.pi7 - p.pi27);
}

inline Form theta_linearization(const G2Structure& s, const Form& xi) {
    return theta_linearization_with(s, make_projectors(s), xi);
}

// J(η) = *((3/4)π₁η + π₇η − π₂₇η) with degree-4 projections; equivalently the
// linearization of Θ^{-1} at ψ.
inline Form j_map_with(const G2Structure& s, const TypeProjectors& P, const Form& eta) {
    const Split3 p = project4_with(s, P, eta);
    return hodge_star(s.metric, p.pi1 * (3.0 / 4.0) + p.pi7 - p.pi27);
}

inline Form j_map(const G2Structure& s, const Form& eta) {
    return j_map_with(s, make_projectors(s), eta);
}

// Damped Newton inversion of Θ seeded at ref.phi: residual tolerance 1e-12 on
// the 4-form, step halving on residual increase, at most 50 iterations.
inline Form theta_inverse(const G2Structure& ref, const Form& psi4,
                          double tol = 1e-12, int max_iter = 50) {
    Form phi = ref.phi;
    double res = (theta(phi) - psi4).c.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iter; ++it) {
        if (res <= tol) return phi;
        const G2Structure cur = G2Structure::from_phi(phi);
        // Newton step: solve dΘ_φ[h] = psi4 − Θ(φ) using the exact
        // linearization (an invertible map for positive φ).
        const Exterior& E = ext7();
        const int d = E.dim(3);
        const TypeProjectors P = make_projectors(cur);
        Eigen::MatrixXd Jm(d, d);
        for (int j = 0; j < d; ++j) {
            Form e = form7(3);
            e.c[j] = 1.0;
            Jm.col(j) = theta_linearization_with(cur, P, e).c;
        }
        const Eigen::VectorXd rhs = (psi4 - cur.psi).c;
        Form h = form7(3);
        h.c = Jm.fullPivLu().solve(rhs);

        double t = 1.0;
        bool accepted = false;
        for (int halve = 0; halve < 25; ++halve) {
            Form trial = phi;
            trial.c = phi.c + t * h.c;
            double trial_res;
            try {
                trial_res = (theta(trial) - psi4).c.lpNorm<Eigen::Infinity>();
            } catch (const NotPositive&) {
                t *= 0.5;
                continue;
            }
            if (trial_res < res) {
                phi = trial;
                res = trial_res;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            throw NoConvergence("theta_inverse: damping failed to reduce the residual");
    }
    if (res <= tol) return phi;
    throw NoConvergence("theta_inverse: residual above tolerance after max iterations");
}

// --- quadratic remainders -----------------------------------------------------

// F(ξ) = Θ(φ+ξ) − ψ − *((4/3)π₁ξ + π₇ξ − π₂₇ξ); vanishes to second order.
inline Form remainder_F(const G2Structure& s, const Form& xi) {
    Form pert = s.phi;
    pert.c += xi.c;
    return theta(pert) - s.psi - theta_linearization(s, xi);
}

// G(η) = Θ^{-1}(ψ+η) − φ − J(η); vanishes to second order.
inline Form remainder_G(const G2Structure& s, const Form& eta) {
    Form pert = s.psi;
    pert.c += eta.c;
    return theta_inverse(s, pert) - s.phi - j_map(s, eta);
}

}  // namespace g2glue
