#pragma once
// Batch suites shared by the command-line driver and the acceptance gate.
// Each suite returns named pass/fail checks plus CSV tables for emission;
// nothing here prints or exits, so callers control reporting.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "g2glue/cone_calculus.hpp"
#include "g2glue/errors.hpp"
#include "g2glue/exterior.hpp"
#include "g2glue/g2_pointwise.hpp"
#include "g2glue/glue_sim.hpp"
#include "g2glue/io.hpp"
#include "g2glue/link_algebra.hpp"
#include "g2glue/nearly_kahler.hpp"
#include "g2glue/rate_analysis.hpp"

namespace g2glue {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;  // measured value / context for the report
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    std::map<std::string, CsvTable> tables;  // filename stem -> table

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    void add(const std::string& name, bool pass, double measured) {
        std::ostringstream d;
        d.precision(3);
        d << "measured " << measured;
        checks.push_back({name, pass, d.str()});
    }
    void add(const std::string& name, bool pass, const std::string& detail = "") {
        checks.push_back({name, pass, detail});
    }
};

namespace run_detail {

inline Form random_form(int n, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Form f(n, k);
    for (int i = 0; i < f.c.size(); ++i) f.c[i] = gauss(rng);
    return f;
}

inline double inner7(const Metric7& m, const Form& a, const Form& b) {
    const Eigen::MatrixXd G = ext7().gram(a.degree, m.g.inverse());
    return a.c.dot(G * b.c);
}

}  // namespace run_detail

// ---------------------------------------------------------------------------
// Pointwise G2 algebra suite

inline SuiteReport suite_pointwise(std::uint64_t seed = 42) {
    using run_detail::inner7;
    using run_detail::random_form;
    SuiteReport rep;
    rep.suite = "verify-pointwise";
    std::mt19937_64 rng(seed);

    const G2Structure s = standard_g2();
    const TypeProjectors P = make_projectors(s);
    const int d3 = ext7().dim(3);

    // Metric recovery on the reference 3-form.
    const double metric_err =
        (s.metric.g - Eigen::Matrix<double, 7, 7>::Identity()).cwiseAbs().maxCoeff();
    rep.add("metric_from_3form(phi0) = identity", metric_err < 1e-13, metric_err);

    // Type decomposition dimensions.
    const double tr1 = P.p1.trace(), tr7 = P.p7.trace(), tr27 = P.p27.trace();
    rep.add("projection dimensions (1,7,27)",
            std::fabs(tr1 - 1) < 1e-9 && std::fabs(tr7 - 7) < 1e-9 &&
                std::fabs(tr27 - 27) < 1e-9,
            std::fabs(tr1 - 1) + std::fabs(tr7 - 7) + std::fabs(tr27 - 27));

    // Resolution of identity and mutual orthogonality on random 3- and 4-forms.
    double worst_resid = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const bool deg3 = trial % 2 == 0;
        Form x = random_form(7, deg3 ? 3 : 4, rng);
        x = x * (1.0 / x.c.norm());
        const Split3 p = deg3 ? project3_with(P, x) : project4_with(s, P, x);
        const Form back = p.pi1 + p.pi7 + p.pi27;
        worst_resid = std::max(worst_resid, (back - x).c.cwiseAbs().maxCoeff());
        worst_resid = std::max(worst_resid, std::fabs(inner7(s.metric, p.pi1, p.pi7)));
        worst_resid = std::max(worst_resid, std::fabs(inner7(s.metric, p.pi1, p.pi27)));
        worst_resid = std::max(worst_resid, std::fabs(inner7(s.metric, p.pi7, p.pi27)));
    }
    rep.add("pi1+pi7+pi27 = id, mutually orthogonal (200 random 3-/4-forms)",
            worst_resid < 1e-12, worst_resid);

    // J on the reference 4-form.
    const double jpsi_err = (j_map(s, s.psi) - s.phi * (3.0 / 4.0)).c.cwiseAbs().maxCoeff();
    rep.add("J(psi0) = (3/4) phi0", jpsi_err < 1e-12, jpsi_err);

    // J(*xi) = -xi on 50 random type-27 directions.
    double worst_j27 = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Form x(7, 3);
        x.c = P.p27 * random_form(7, 3, rng).c;
        x = x * (1.0 / x.c.norm());
        const Form jx = j_map(s, hodge_star(s.metric, x));
        worst_j27 = std::max(worst_j27, (jx + x).c.cwiseAbs().maxCoeff());
    }
    rep.add("J(*xi) = -xi on 50 random type-27 forms", worst_j27 < 1e-10, worst_j27);

    // Quadratic remainders: exact zero at the origin.
    const double f0 = remainder_F(s, Form(7, 3)).c.cwiseAbs().maxCoeff();
    const double g0 = remainder_G(s, Form(7, 4)).c.cwiseAbs().maxCoeff();
    rep.add("F(0) = 0 and G(0) = 0 exactly", f0 == 0.0 && g0 == 0.0, f0 + g0);

    // |F(t xi)|/t^2 and |G(t eta)|/t^2 stable to 10% over t in [1e-4, 1e-2].
    double worst_var = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const bool use_f = trial % 2 == 0;
        Form x = random_form(7, use_f ? 3 : 4, rng);
        x = x * (1.0 / x.c.norm());
        double lo = HUGE_VAL, hi = 0.0;
        for (double t : {1e-4, 1e-3, 1e-2}) {
            const Form r = use_f ? remainder_F(s, x * t) : remainder_G(s, x * t);
            const double ratio = r.c.norm() / (t * t);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        if (lo > 0.0) worst_var = std::max(worst_var, hi / lo - 1.0);
    }
    rep.add("|F(t xi)|/t^2 and |G(t eta)|/t^2 vary < 10% over t in [1e-4,1e-2]",
            worst_var < 0.10, worst_var);

    // Finite-difference derivative of Theta against *((4/3)pi1 + pi7 - pi27).
    double worst_fd = 0.0;
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        Form x = random_form(7, 3, rng);
        x = x * (1.0 / x.c.norm());
        const Form fd = (theta(s.phi + x * h) - theta(s.phi - x * h)) * (1.0 / (2.0 * h));
        worst_fd = std::max(worst_fd, (fd - theta_linearization(s, x)).c.cwiseAbs().maxCoeff());
    }
    rep.add("FD derivative of Theta matches *((4/3)pi1+pi7-pi27)", worst_fd < 1e-8, worst_fd);

    (void)d3;
    return rep;
}

// ---------------------------------------------------------------------------
// Link / nearly Kähler suite

inline SuiteReport suite_link(const LinkAlgebra& alg) {
    SuiteReport rep;
    rep.suite = "verify-link";

    const NKSolution nk = solve_nk(alg);
    rep.add("nearly Kahler solve residual < 1e-10", nk.residual < 1e-10, nk.residual);

    const std::size_t h1 = nk.algebra.harmonic_representatives(1).size();
    rep.add("zero invariant harmonic 1-forms", h1 == 0, static_cast<double>(h1));

    // Structure equations, re-checked on the returned structure.
    const Form om2 = ext6().wedge(nk.su3.omega, nk.su3.omega);
    const double e1 =
        (nk.algebra.d(nk.su3.omega).c + nk.su3.re_omega3.c * 3.0).lpNorm<Eigen::Infinity>();
    const double e2 =
        (nk.algebra.d(nk.su3.im_omega3).c - om2.c * 2.0).lpNorm<Eigen::Infinity>();
    rep.add("d(omega) = -3 ReOmega", e1 < 1e-10, e1);
    rep.add("d(ImOmega) = 2 omega^2", e2 < 1e-10, e2);

    // Spectrum CSV: eigenvalue and multiplicity per degree.
    CsvTable spec;
    spec.header = {"degree", "eigenvalue", "multiplicity"};
    for (int k = 0; k <= 6; ++k)
        for (const auto& pair : nk.algebra.invariant_spectrum(k))
            spec.add_row({std::to_string(k), csv_cell(pair.eigenvalue),
                          std::to_string(pair.eigenbasis.size())});
    rep.tables["link_spectrum"] = spec;
    return rep;
}

// ---------------------------------------------------------------------------
// Cone structure suite

inline SuiteReport suite_cone(const LinkAlgebra& alg) {
    SuiteReport rep;
    rep.suite = "verify-cone";

    const NKSolution nk = solve_nk(alg);
    const ConeG2 cone = build_cone_g2(nk.algebra, nk.su3);
    const LinkAlgebra& L = cone.link;

    const double dphi = cone_d(L, cone.phi_c).max_abs_coeff();
    rep.add("d(phi_C) = 0", dphi == 0.0, dphi);
    const double dpsi = cone_d(L, cone.psi_c).max_abs_coeff();
    rep.add("d(psi_C) = 0", dpsi == 0.0, dpsi);

    const double star_err = (cone_star(L, cone.phi_c) - cone.psi_c).max_abs_coeff();
    rep.add("*phi_C = psi_C as term data", star_err < 1e-12, star_err);

    // Exactness: phi_C = d(-r^3 omega / 3) and psi_C = d(-r^4 ImOmega / 4).
    const ConeForm prim3 = cone_term(2, Order(1), Form(6, 1), cone.nk.omega * (-1.0 / 3.0));
    const double ex3 = (cone_d(L, prim3) - cone.phi_c).max_abs_coeff();
    rep.add("phi_C = d(-r^3 omega/3)", ex3 == 0.0, ex3);
    const ConeForm prim4 =
        cone_term(3, Order(1), Form(6, 2), cone.nk.im_omega3 * (-1.0 / 4.0));
    const double ex4 = (cone_d(L, prim4) - cone.psi_c).max_abs_coeff();
    rep.add("psi_C = d(-r^4 ImOmega/4)", ex4 == 0.0, ex4);

    // Convention lock: pointwise Theta at r = 1.
    const Form phi1 = evaluate_at(L, cone.phi_c, 3, 1.0);
    const Form psi1 = evaluate_at(L, cone.psi_c, 4, 1.0);
    const double lock = (theta(phi1) - psi1).c.cwiseAbs().maxCoeff();
    rep.add("Theta(phi_C|r=1) = psi_C|r=1", lock < 1e-10, lock);
    return rep;
}

// ---------------------------------------------------------------------------
// Rate analysis

inline SuiteReport suite_rates_scan(const LinkAlgebra& alg, Parity parity, double from,
                                    double to) {
    SuiteReport rep;
    rep.suite = "rates";
    const NKSolution nk = solve_nk(alg);
    const RatePencil pencil = assemble_dirac_pencil(nk.algebra, parity);
    const CriticalRateSet crs = critical_rates(pencil, from, to);

    CsvTable table;
    table.header = {"lambda", "sigma_min", "kernel_dim", "log_chain"};
    for (const CriticalRate& r : crs.rates)
        table.add_row({csv_cell(r.lambda), csv_cell(r.sigma), std::to_string(r.kernel_dim),
                       std::to_string(r.log_chain)});
    rep.tables["critical_rates"] = table;

    std::ostringstream d;
    d << crs.rates.size() << " critical rate(s) in [" << from << ", " << to << "]";
    rep.add("critical-rate scan completed", true, d.str());
    return rep;
}

inline SuiteReport suite_rates_full(const LinkAlgebra& alg) {
    SuiteReport rep;
    rep.suite = "rates";
    const NKSolution nk = solve_nk(alg);
    const LinkAlgebra& L = nk.algebra;

    // Excluded ranges: Laplacian k = 0,1,2 (and star-dual degrees), then the
    // closed&coclosed system for every degree.
    for (int k : {0, 1, 2, 5, 6, 7}) {
        bool ok = true;
        std::string detail;
        try {
            const ExcludedRangeReport r = excluded_range_report(L, ConeOperator::laplacian, k);
            ok = r.verified;
            std::ostringstream d;
            d << "(" << r.lo << ", " << r.hi << ") empty";
            detail = d.str();
        } catch (const UnexpectedKernel& e) {
            ok = false;
            detail = e.what();
        }
        rep.add("Laplacian excluded range, degree " + std::to_string(k), ok, detail);
    }
    for (int k = 0; k <= 7; ++k) {
        bool ok = true;
        std::string detail;
        try {
            const ExcludedRangeReport r =
                excluded_range_report(L, ConeOperator::closed_coclosed, k);
            ok = r.verified;
            std::ostringstream d;
            d << "(" << r.lo << ", " << r.hi << ") empty";
            detail = d.str();
        } catch (const UnexpectedKernel& e) {
            ok = false;
            detail = e.what();
        }
        rep.add("closed&coclosed excluded range, degree " + std::to_string(k), ok, detail);
    }

    // Boundary rates on functions do produce kernel.
    {
        const RatePencil p0 = assemble_laplacian_pencil(L, 0);
        const double s_at0 = sigma_min(p0(0.0));
        const double s_atm5 = sigma_min(p0(-5.0));
        rep.add("function boundary rates 0 and -5 carry kernel",
                s_at0 < 1e-10 && s_atm5 < 1e-10, std::max(s_at0, s_atm5));
    }

    // Even-parity kernel at -3: two dimensions of dr wedge (harmonic 3-forms),
    // trivial log chain; pure 4-form kernel at -4 empty.
    {
        const RatePencil even = assemble_dirac_pencil(L, Parity::even);
        const CriticalRateSet crs = critical_rates(even, -3.5, -2.5);
        const bool one_rate = crs.rates.size() == 1;
        const bool at_m3 =
            one_rate && std::fabs(crs.rates.front().lambda + 3.0) < 1e-9;
        rep.add("single even-parity critical rate at -3 in [-3.5,-2.5]", one_rate && at_m3,
                one_rate ? crs.rates.front().lambda : HUGE_VAL);
        if (one_rate) {
            const CriticalRate& r = crs.rates.front();
            rep.add("order -3 kernel is 2-dimensional with log-chain 0",
                    r.kernel_dim == 2 && r.log_chain == 0,
                    "dim " + std::to_string(r.kernel_dim) + ", chain " +
                        std::to_string(r.log_chain));

            // Kernel elements equal dr wedge (invariant harmonic 3-forms):
            // beta slots vanish, alpha slots harmonic.
            double worst = 0.0;
            bool type27 = true;
            const NKSolution nk2 = solve_nk(alg);
            const ConeG2 cone = build_cone_g2(nk2.algebra, nk2.su3);
            for (const ConeForm& w : r.kernel) {
                for (const ConeTerm& t : w.terms) {
                    if (t.degree == 4) {
                        worst = std::max(worst, t.beta.c.norm());
                        worst = std::max(worst, L.laplacian(t.alpha).c.norm());
                        if (t.alpha.c.norm() > 1e-9)
                            type27 = type27 && check_type27(cone, cone_term(3, Order(-3),
                                                                            Form(6, 2),
                                                                            t.alpha));
                    } else {
                        if (t.degree > 0) worst = std::max(worst, t.alpha.c.norm());
                        if (t.degree < 7) worst = std::max(worst, t.beta.c.norm());
                    }
                }
            }
            rep.add("order -3 kernel = dr ^ (invariant harmonic 3-forms)", worst < 1e-9,
                    worst);
            rep.add("order -3 harmonic 3-forms have pure type 27", type27);
        }
        const RatePencil cc4 = assemble_closed_coclosed_pencil(L, 4);
        const Eigen::MatrixXd K4 = kernel_basis(cc4(-4.0));
        rep.add("pure 4-form kernel at -4 is empty", K4.cols() == 0,
                static_cast<double>(K4.cols()));
    }

    // Eigenvalue identity at the critical rates of every single-degree system.
    for (int k = 0; k <= 7; ++k) {
        const EigenvalueIdentityReport r = eigenvalue_identity_check(L, k);
        double worst = 0.0;
        for (const auto& e : r.entries) worst = std::max(worst, e.max_residual);
        rep.add("eigenvalue identity (lambda+k)(lambda-k+7), degree " + std::to_string(k),
                r.all_pass, worst);
    }

    // Order -k classification for a representative spread of degrees.
    for (int k : {0, 3, 4}) {
        const MinusKClassification r = order_minus_k_classification(L, k);
        rep.add("order -" + std::to_string(k) + " kernel classification", r.pass,
                "dim " + std::to_string(r.kernel_dim));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Glue scan

inline SuiteReport suite_glue_scan(const GlueParams& p, double slope_tol = 0.05) {
    SuiteReport rep;
    rep.suite = "glue-scan";
    const GlueScanResult r = glue_scan(p, 1e-4, 1e-1, slope_tol);

    CsvTable table;
    table.header = {"s", "region", "c0", "l2", "l14"};
    for (const NormReport& n : r.reports)
        table.add_row({csv_cell(n.s), region_name(n.region), csv_cell(n.c0), csv_cell(n.l2),
                       csv_cell(n.l14)});
    for (double s : r.s_grid) {
        const NormReport t = combine_regions(r.reports, s);
        table.add_row({csv_cell(s), "total", csv_cell(t.c0), csv_cell(t.l2), csv_cell(t.l14)});
    }
    rep.tables["glue_scan"] = table;

    rep.add("C0 slope matches prediction", std::fabs(r.c0.slope - r.predicted.c0) <= slope_tol,
            r.c0.slope - r.predicted.c0);
    rep.add("L2 slope matches prediction", std::fabs(r.l2.slope - r.predicted.l2) <= slope_tol,
            r.l2.slope - r.predicted.l2);
    rep.add("L14 slope matches prediction",
            std::fabs(r.l14.slope - r.predicted.l14) <= slope_tol,
            r.l14.slope - r.predicted.l14);
    std::ostringstream d;
    d << "window [" << r.window_lo << ", " << r.window_hi << "], slopes " << r.c0.slope
      << " / " << r.l2.slope << " / " << r.l14.slope;
    rep.add("scan window", true, d.str());
    return rep;
}

// ---------------------------------------------------------------------------
// Feasibility

inline SuiteReport suite_feasibility(double mu, double nu_prime, double delta) {
    SuiteReport rep;
    rep.suite = "feasibility";
    const FeasibilityRegion fr = feasibility_region(mu, nu_prime, delta);

    CsvTable table;
    table.header = {"kappa", "gamma_lb_mu", "gamma_lb_nu", "gamma_lb_delta"};
    const int samples = 200;
    for (int i = 1; i < samples; ++i) {
        const double kappa = fr.kappa_max * i / samples;
        if (!fr.kappa_feasible(kappa)) continue;
        table.add_row({csv_cell(kappa), csv_cell(fr.gamma_lb_mu(kappa)),
                       csv_cell(fr.gamma_lb_nu(kappa)), csv_cell(fr.gamma_lb_delta(kappa))});
    }
    rep.tables["feasibility"] = table;

    // Region nonempty exactly on (0, kappa_max), probed within 1e-6 of the cap.
    const bool inside = fr.kappa_feasible(fr.kappa_max - 1e-6) &&
                        fr.kappa_feasible(fr.kappa_max / 2.0);
    const bool outside = !fr.kappa_feasible(fr.kappa_max + 1e-6) && !fr.kappa_feasible(0.0);
    rep.add("region nonempty exactly for 0 < kappa < min(delta, 1/2, mu)", inside && outside,
            fr.kappa_max);

    // L2-dominance: wherever the L2 exponent inequality holds with gamma < 1,
    // the C0 and L14 inequalities hold too (100x100 grid).
    int violations = 0;
    for (int i = 1; i < 100; ++i) {
        for (int j = 1; j < 100; ++j) {
            const double gamma = i / 100.0;
            const double kappa = 0.5 * j / 100.0;
            GlueParams p;
            p.mu = mu;
            p.nu_prime = nu_prime;
            p.delta = delta;
            p.gamma = gamma;
            p.kappa = kappa;
            const PredictedExponents e = predicted_exponents(p);
            const bool l2 = e.l2 >= 3.5 + kappa;
            const bool c0 = e.c0 >= kappa;
            const bool l14 = e.l14 >= -0.5 + kappa;
            if (l2 && !(c0 && l14)) ++violations;
        }
    }
    rep.add("L2 inequality dominates C0 and L14 on (gamma,kappa) grid", violations == 0,
            static_cast<double>(violations));
    return rep;
}

// ---------------------------------------------------------------------------
// Joyce gate

inline SuiteReport suite_joyce(const GlueParams& p, double D1, double D2, double D3,
                               const RegionConstants& C = RegionConstants{}) {
    SuiteReport rep;
    rep.suite = "joyce-gate";
    const double s0 = joyce_threshold(p, D1, D2, D3, 1e-8, 0.5, C);
    rep.add("threshold s0 > 0 located by bisection", s0 > 0.0, s0);
    if (s0 > 0.0) {
        const PredictedExponents e = predicted_exponents(p);
        const double s = s0 * 0.5;
        const NormReport model{s, Region::outer, std::pow(s, e.c0), std::pow(s, e.l2),
                               std::pow(s, e.l14)};
        const JoyceVerdict v = joyce_gate(p, s, D1, D2, D3, model, C);
        rep.add("all hypotheses hold below s0", v.all(),
                std::string("at s = ") + csv_cell(s));
        // Dominant model branches at small s.
        const bool curv_outer = C.outer * std::pow(s, -2.0) >=
                                std::max(C.inner, C.overlap * std::pow(s, -2.0 * p.gamma));
        const bool inj_outer =
            C.outer * s <= std::min(C.inner, C.overlap * std::pow(s, p.gamma));
        rep.add("curvature model dominated by outer s^-2 term", curv_outer, v.curvature);
        rep.add("injectivity model dominated by outer s term", inj_outer, v.injectivity);
    }
    return rep;
}

}  // namespace g2glue
