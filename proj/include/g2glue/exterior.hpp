#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace g2glue {

// A k-form with constant coefficients on R^n, stored against the fixed
// lexicographic basis of k-fold wedge products e^{i1} ∧ ... ∧ e^{ik} with
// i1 < ... < ik.  Degree and dimension are runtime values because the same
// machinery serves both the 6-dimensional link and 7-dimensional pointwise
// modules.
struct Form {
    int n = 0;       // ambient dimension
    int degree = 0;  // k
    Eigen::VectorXd c;

    Form() = default;
    Form(int n_, int k_) : n(n_), degree(k_) {
        c = Eigen::VectorXd::Zero(binom(n_, k_));
    }

    static std::int64_t binom(int n, int k) {
        if (k < 0 || k > n) return 0;
        std::int64_t r = 1;
        for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
        return r;
    }

    bool is_zero(double tol = 0.0) const {
        return c.size() == 0 || c.lpNorm<Eigen::Infinity>() <= tol;
    }

    Form& operator+=(const Form& o) {
        c += o.c;
        return *this;
    }
    Form operator+(const Form& o) const {
        Form r = *this;
        r.c += o.c;
        return r;
    }
    Form operator-(const Form& o) const {
        Form r = *this;
        r.c -= o.c;
        return r;
    }
    Form operator-() const {
        Form r = *this;
        r.c = -r.c;
        return r;
    }
    Form operator*(double s) const {
        Form r = *this;
        r.c *= s;
        return r;
    }
    friend Form operator*(double s, const Form& f) { return f * s; }
};

// Shared combinatorial tables for Λ*(R^n): basis masks in lexicographic
// order, positions, and merge signs.  Construct once per ambient dimension.
class Exterior {
  public:
    explicit Exterior(int n) : n_(n) {
        if (n < 1 || n > 16) throw std::invalid_argument("Exterior: bad dimension");
        basis_.resize(n + 1);
        pos_.assign(std::size_t(1) << n, -1);
        for (int k = 0; k <= n; ++k) {
            std::vector<int> idx(k);
            for (int i = 0; i < k; ++i) idx[i] = i;
            // Enumerate k-subsets of {0..n-1} in lexicographic order.
            while (true) {
                std::uint32_t mask = 0;
                for (int i : idx) mask |= (1u << i);
                pos_[mask] = static_cast<int>(basis_[k].size());
                basis_[k].push_back(mask);
                if (k == 0) break;
                int t = k - 1;
                while (t >= 0 && idx[t] == n - k + t) --t;
                if (t < 0) break;
                ++idx[t];
                for (int j = t + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }

    int n() const { return n_; }
    int dim(int k) const {
        return (k < 0 || k > n_) ? 0 : static_cast<int>(basis_[k].size());
    }
    const std::vector<std::uint32_t>& basis(int k) const { return basis_[k]; }
    int pos(std::uint32_t mask) const { return pos_[mask]; }

    // Sign of e^A ∧ e^B -> e^{A ∪ B}; 0 when the index sets overlap.
    static int merge_sign(std::uint32_t a, std::uint32_t b) {
        if (a & b) return 0;
        int inversions = 0;
        for (std::uint32_t bb = b; bb; bb &= bb - 1) {
            const int i = std::countr_zero(bb);
            // count elements of a strictly greater than i
            inversions += std::popcount(a >> (i + 1));
        }
        return (inversions & 1) ? -1 : 1;
    }

    Form wedge(const Form& a, const Form& b) const {
        Form r(n_, a.degree + b.degree);
        if (a.degree + b.degree > n_) {
            r = Form(n_, n_);  // zero form of top degree is the safest sink
            r.c.setZero();
            throw std::invalid_argument("wedge: degree exceeds dimension");
        }
        const auto& ba = basis_[a.degree];
        const auto& bb = basis_[b.degree];
        for (int i = 0; i < static_cast<int>(ba.size()); ++i) {
            const double ai = a.c[i];
            if (ai == 0.0) continue;
            for (int j = 0; j < static_cast<int>(bb.size()); ++j) {
                const double bj = b.c[j];
                if (bj == 0.0) continue;
                const int s = merge_sign(ba[i], bb[j]);
                if (s == 0) continue;
                r.c[pos_[ba[i] | bb[j]]] += s * ai * bj;
            }
        }
        return r;
    }

    // Interior product with the coordinate vector e_i (metric-free).
    Form contract_basis(int i, const Form& w) const {
        Form r(n_, w.degree - 1);
        if (w.degree == 0) return Form(n_, 0);  // caller treats as zero in Λ^{-1}
        const auto& bk = basis_[w.degree];
        const std::uint32_t bit = 1u << i;
        for (int p = 0; p < static_cast<int>(bk.size()); ++p) {
            if (!(bk[p] & bit) || w.c[p] == 0.0) continue;
            const int before = std::popcount(bk[p] & (bit - 1));
            const int s = (before & 1) ? -1 : 1;
            r.c[pos_[bk[p] & ~bit]] += s * w.c[p];
        }
        return r;
    }

    // Gram matrix of the lexicographic k-form basis for a metric whose
    // inverse (the metric on 1-forms) is h.
    Eigen::MatrixXd gram(int k, const Eigen::MatrixXd& h) const {
        const auto& bk = basis_[k];
        const int d = dim(k);
        Eigen::MatrixXd g(d, d);
        std::vector<int> I, J;
        for (int p = 0; p < d; ++p) {
            I.clear();
            for (int b = 0; b < n_; ++b)
                if (bk[p] & (1u << b)) I.push_back(b);
            for (int q = 0; q < d; ++q) {
                J.clear();
                for (int b = 0; b < n_; ++b)
                    if (bk[q] & (1u << b)) J.push_back(b);
                Eigen::MatrixXd m(k, k);
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b) m(a, b) = h(I[a], J[b]);
                g(p, q) = (k == 0) ? 1.0 : m.determinant();
            }
        }
        return g;
    }

    // Hodge star with the convention a ∧ *b = <a,b> vol, where
    // vol = vol_coeff · e^{0...n-1} and h is the metric on 1-forms.
    // For each basis index I: (*b)_{I^c} = sign(I, I^c) · vol_coeff · (G_k b)_I.
    Form star(const Form& w, const Eigen::MatrixXd& h, double vol_coeff) const {
        const int k = w.degree;
        Form r(n_, n_ - k);
        const Eigen::VectorXd gb = gram(k, h) * w.c;
        const std::uint32_t full = (1u << n_) - 1;
        const auto& bk = basis_[k];
        for (int p = 0; p < dim(k); ++p) {
            const std::uint32_t comp = full & ~bk[p];
            const int s = merge_sign(bk[p], comp);
            r.c[pos_[comp]] += s * vol_coeff * gb[p];
        }
        return r;
    }

    // Pullback of w under the linear map sending e^i to sum_j T(i,j) e^j.
    Form pullback(const Eigen::MatrixXd& T, const Form& w) const {
        const int k = w.degree;
        Form r(n_, k);
        if (k == 0) {
            r.c = w.c;
            return r;
        }
        const auto& bk = basis_[k];
        std::vector<int> I, J;
        for (int p = 0; p < dim(k); ++p) {
            if (w.c[p] == 0.0) continue;
            I.clear();
            for (int b = 0; b < n_; ++b)
                if (bk[p] & (1u << b)) I.push_back(b);
            for (int q = 0; q < dim(k); ++q) {
                J.clear();
                for (int b = 0; b < n_; ++b)
                    if (bk[q] & (1u << b)) J.push_back(b);
                Eigen::MatrixXd m(k, k);
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b) m(a, b) = T(I[a], J[b]);
                r.c[q] += w.c[p] * m.determinant();
            }
        }
        return r;
    }

  private:
    int n_;
    std::vector<std::vector<std::uint32_t>> basis_;  // per-degree masks, lex order
    std::vector<int> pos_;                           // mask -> position in its degree
};

}  // namespace g2glue
