#pragma once

// Constant-coefficient exterior calculus on a 6-dimensional homogeneous link
// presented by structure constants: the Chevalley–Eilenberg differential, the
// Hodge star / codifferential / Laplacian against a constant metric, full
// invariant spectra, and harmonic representatives.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "g2glue/errors.hpp"
#include "g2glue/exterior.hpp"

namespace g2glue {

inline const Exterior& ext6() {
    static const Exterior e(6);
    return e;
}

inline Form form6(int k) { return Form(6, k); }

class LinkAlgebra {
  public:
    // c[i][j][k] are the structure constants c^i_{jk} (antisymmetric in j,k)
    // so that d e^i = -1/2 c^i_{jk} e^j ∧ e^k.
    using Constants = std::array<std::array<std::array<double, 6>, 6>, 6>;

    static LinkAlgebra make(const Constants& c, const Eigen::Matrix<double, 6, 6>& g,
                            int orientation = 1) {
        LinkAlgebra alg;
        alg.c_ = c;
        alg.g_ = g;
        alg.orientation_ = orientation >= 0 ? 1 : -1;
        alg.validate();
        alg.assemble();
        return alg;
    }

    const Eigen::Matrix<double, 6, 6>& metric() const { return g_; }
    int orientation() const { return orientation_; }
    double structure_constant(int i, int j, int k) const { return c_[i][j][k]; }

    // Signed coefficient of the volume form against e^{0...5}.
    double vol_coeff() const { return orientation_ * std::sqrt(g_.determinant()); }
    // Total volume of the link (coordinate cell normalized to 1).
    double total_volume() const { return std::sqrt(g_.determinant()); }

    Form volume_form() const {
        Form v = form6(6);
        v.c[0] = vol_coeff();
        return v;
    }

    // --- calculus -------------------------------------------------------------

    const Eigen::MatrixXd& d_matrix(int k) const { return d_[k]; }

    Form d(const Form& w) const {
        Form r = form6(w.degree + 1);
        if (w.degree >= 6) return r;
        r.c = apply(d_[w.degree], w.c);
        return r;
    }

    Form star(const Form& w) const { return ext6().star(w, h_, vol_coeff()); }

    // d* = -*d* on every degree in dimension 6 (Riemannian); the sign is
    // validated by the adjointness test <dα,β> = <α,d*β> in the suite.
    Form codiff(const Form& w) const {
        if (w.degree == 0) return form6(0) * 0.0;  // no (-1)-forms
        Form r = star(d(star(w)));
        r.c = -r.c;
        return r;
    }

    Form laplacian(const Form& w) const {
        Form r = w.degree < 6 ? codiff(d(w)) : form6(w.degree) * 0.0;
        if (w.degree > 0) r += d(codiff(w));
        return r;
    }

    Eigen::MatrixXd gram(int k) const { return ext6().gram(k, h_); }

    // Invariant inner product (pointwise Gram scaled by the total volume).
    double inner(const Form& a, const Form& b) const {
        return total_volume() * a.c.dot(gram(a.degree) * b.c);
    }
    double norm(const Form& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

    // --- spectra ----------------------------------------------------------------

    struct EigenPair {
        double eigenvalue;
        std::vector<Form> eigenbasis;  // orthonormal under inner()
    };

    // Full eigendecomposition of Δ on invariant k-forms, eigenvalues grouped
    // and sorted ascending.
    std::vector<EigenPair> invariant_spectrum(int k) const {
        const Exterior& E = ext6();
        const int d = E.dim(k);
        Eigen::MatrixXd L(d, d);
        for (int j = 0; j < d; ++j) {
            Form e = form6(k);
            e.c[j] = 1.0;
            L.col(j) = laplacian(e).c;
        }
        // Symmetrize in Gram-orthonormal coordinates.
        const Eigen::MatrixXd G = total_volume() * gram(k);
        const Eigen::LLT<Eigen::MatrixXd> llt(G);
        const Eigen::MatrixXd Ct = Eigen::MatrixXd(llt.matrixL()).transpose();
        Eigen::MatrixXd Ls = Ct * L * Ct.fullPivLu().inverse();
        Ls = 0.5 * (Ls + Ls.transpose()).eval();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ls);

        std::vector<EigenPair> out;
        for (int i = 0; i < d; ++i) {
            const double ev = es.eigenvalues()[i];
            Form f = form6(k);
            f.c = Ct.fullPivLu().solve(es.eigenvectors().col(i).eval());
            if (!out.empty() && std::fabs(out.back().eigenvalue - ev) < 1e-8) {
                out.back().eigenbasis.push_back(f);
            } else {
                out.push_back({ev, {f}});
            }
        }
        return out;
    }

    // Orthonormal basis of ker Δ on invariant k-forms; each element is closed
    // and coclosed.
    std::vector<Form> harmonic_representatives(int k) const {
        const auto spec = invariant_spectrum(k);
        std::vector<Form> out;
        if (!spec.empty() && std::fabs(spec.front().eigenvalue) < 1e-10)
            out = spec.front().eigenbasis;
        return out;
    }

  private:
    void validate() {
        // metric
        if ((g_ - g_.transpose()).norm() > 1e-14)
            throw MetricNotPositive("link metric is not symmetric");
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(g_);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw MetricNotPositive("link metric is not positive-definite");
        h_ = g_.inverse();

        // antisymmetry in the lower indices
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int k = 0; k < 6; ++k)
                    if (std::fabs(c_[i][j][k] + c_[i][k][j]) > 1e-12)
                        throw JacobiViolation("structure constants not antisymmetric in the lower indices");

        // Jacobi identity
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int k = 0; k < 6; ++k)
                    for (int l = 0; l < 6; ++l) {
                        double s = 0.0;
                        for (int m = 0; m < 6; ++m)
                            s += c_[i][j][m] * c_[m][k][l] + c_[i][k][m] * c_[m][l][j] +
                                 c_[i][l][m] * c_[m][j][k];
                        if (std::fabs(s) > 1e-12)
                            throw JacobiViolation("Jacobi identity violated");
                    }
    }

    void assemble() {
        const Exterior& E = ext6();
        // d on 1-forms from the structure constants.
        std::vector<Form> de(6, form6(2));
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j)
                for (int k = j + 1; k < 6; ++k)
                    de[i].c[E.pos((1u << j) | (1u << k))] -= c_[i][j][k];
        }
        // Extend as an antiderivation to every degree.
        d_.resize(7);
        d_[0] = Eigen::MatrixXd::Zero(E.dim(1), 1);  // constants are closed
        d_[6] = Eigen::MatrixXd::Zero(0, 1);         // top forms are closed
        for (int k = 1; k <= 5; ++k) {
            Eigen::MatrixXd D = Eigen::MatrixXd::Zero(E.dim(k + 1), E.dim(k));
            for (int p = 0; p < E.dim(k); ++p) {
                const std::uint32_t mask = E.basis(k)[p];
                // d(e^{i1...ik}) = Σ_t (-1)^{t-1} e^{i1} ∧ ... ∧ d e^{it} ∧ ... ∧ e^{ik}
                int t = 0;
                for (int b = 0; b < 6; ++b) {
                    if (!(mask & (1u << b))) continue;
                    Form rest = form6(k - 1);
                    rest.c[E.pos(mask & ~(1u << b))] = 1.0;
                    Form contrib = E.wedge(de[b], rest);
                    // sign: bring d e^{it} to the front past t-1 one-forms
                    const double s = (t % 2 == 0) ? 1.0 : -1.0;
                    D.col(p) += s * contrib.c;
                    ++t;
                }
            }
            d_[k] = D;
        }
        for (int k = 0; k + 1 <= 5; ++k) {
            const Eigen::MatrixXd dd = d_[k + 1] * d_[k];
            if (dd.cwiseAbs().maxCoeff() > 1e-12)
                throw JacobiViolation("exterior differential does not square to zero");
        }
    }

    // Matrix apply with exact-zero skipping: accumulation order is the order
    // of the nonzero entries, which keeps structurally exact cancellations
    // bit-exact downstream (cone d-exactness).
    static Eigen::VectorXd apply(const Eigen::MatrixXd& M, const Eigen::VectorXd& x) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(M.rows());
        for (int i = 0; i < M.rows(); ++i) {
            double acc = 0.0;
            for (int j = 0; j < M.cols(); ++j) {
                const double m = M(i, j);
                if (m == 0.0 || x[j] == 0.0) continue;
                acc += m * x[j];
            }
            y[i] = acc;
        }
        return y;
    }

    Constants c_{};
    Eigen::Matrix<double, 6, 6> g_;
    Eigen::Matrix<double, 6, 6> h_;  // metric on 1-forms
    int orientation_ = 1;
    std::vector<Eigen::MatrixXd> d_;  // d on degree k, index k
};

// ---------------------------------------------------------------------------
// Presets and the link-algebra file format.
//
// File format: line oriented, '#' comments.
//   dimension = 6
//   orientation = 1
//   metric I J VALUE      (1-based indices; VALUE may be a rational p/q)
//   c I J K VALUE         (structure constant c^I_{JK}, 1-based)
// Omitted metric entries default to the identity; omitted constants to 0.
// ---------------------------------------------------------------------------

inline double parse_rational(const std::string& tok) {
    const auto slash = tok.find('/');
    if (slash == std::string::npos) return std::stod(tok);
    const double num = std::stod(tok.substr(0, slash));
    const double den = std::stod(tok.substr(slash + 1));
    if (den == 0.0) throw ConfigParse("rational with zero denominator: " + tok);
    return num / den;
}

inline LinkAlgebra parse_link_algebra(std::istream& in) {
    LinkAlgebra::Constants c{};
    Eigen::Matrix<double, 6, 6> g = Eigen::Matrix<double, 6, 6>::Identity();
    int orientation = 1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        try {
            if (head == "dimension") {
                std::string eq;
                int dim;
                ls >> eq >> dim;
                if (eq != "=" || dim != 6) throw ConfigParse("only dimension = 6 is supported");
            } else if (head == "orientation") {
                std::string eq;
                ls >> eq >> orientation;
                if (eq != "=" || (orientation != 1 && orientation != -1))
                    throw ConfigParse("orientation must be 1 or -1");
            } else if (head == "metric") {
                int i, j;
                std::string v;
                if (!(ls >> i >> j >> v)) throw ConfigParse("metric entry needs I J VALUE");
                if (i < 1 || i > 6 || j < 1 || j > 6) throw ConfigParse("metric index out of range");
                const double val = parse_rational(v);
                g(i - 1, j - 1) = val;
                g(j - 1, i - 1) = val;
            } else if (head == "c") {
                int i, j, k;
                std::string v;
                if (!(ls >> i >> j >> k >> v)) throw ConfigParse("constant entry needs I J K VALUE");
                if (i < 1 || i > 6 || j < 1 || j > 6 || k < 1 || k > 6)
                    throw ConfigParse("structure constant index out of range");
                const double val = parse_rational(v);
                c[i - 1][j - 1][k - 1] = val;
                c[i - 1][k - 1][j - 1] = -val;
            } else {
                throw ConfigParse("unknown key '" + head + "'");
            }
        } catch (const ConfigParse&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigParse("link algebra file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return LinkAlgebra::make(c, g, orientation);
}

inline LinkAlgebra load_link_algebra(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open link algebra file: " + path);
    return parse_link_algebra(in);
}

// The su(2) ⊕ su(2) coframe (factors 0-2 and 3-5, unit structure constants)
// carrying the nearly Kähler metric x(a·a + b·b) + y(a·b + b·a); the default
// parameters are the strictly nearly Kähler values (cross-checked by
// solve_nk, which resolves the overall scale within this shape family).
inline LinkAlgebra preset_s3xs3(double x = 1.0 / 9.0, double y = -1.0 / 18.0,
                                int orientation = -1) {
    LinkAlgebra::Constants c{};
    auto set_su2 = [&](int base) {
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            c[base + i][base + j][base + k] = 1.0;
            c[base + i][base + k][base + j] = -1.0;
        }
    };
    set_su2(0);
    set_su2(3);
    Eigen::Matrix<double, 6, 6> g = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
        g(i, i) = x;
        g(3 + i, 3 + i) = x;
        g(i, 3 + i) = y;
        g(3 + i, i) = y;
    }
    return LinkAlgebra::make(c, g, orientation);
}

inline LinkAlgebra preset_abelian6() {
    return LinkAlgebra::make(LinkAlgebra::Constants{}, Eigen::Matrix<double, 6, 6>::Identity(), 1);
}

inline LinkAlgebra link_preset(const std::string& name) {
    if (name == "s3xs3") return preset_s3xs3();
    if (name == "abelian6") return preset_abelian6();
    throw ConfigParse("unknown link preset: " + name);
}

}  // namespace g2glue
