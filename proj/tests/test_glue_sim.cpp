#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "g2glue/glue_sim.hpp"

using namespace g2glue;

namespace {

GlueParams base_params() {
    GlueParams p;
    p.mu = 1.0;
    p.nu = -4.0;
    p.nu_prime = -4.0;
    p.delta = 0.2;
    p.epsilon = 0.5;
    p.gamma = 0.8;
    p.R = 1.01;  // keeps the default scan window admissible (s R' < s^gamma)
    p.kappa = 0.1;
    return p;
}

}  // namespace

TEST_CASE("quintic cutoff: C2 joints, sup of the derivative is (15/8) s^-gamma") {
    const double s = 1e-3, gamma = 0.8;
    const double sg = std::pow(s, gamma);
    CHECK(cutoff_u(sg, s, gamma).value == 0.0);
    CHECK(cutoff_u(2.0 * sg, s, gamma).value == 1.0);
    CHECK(cutoff_u(1.5 * sg, s, gamma).value == doctest::Approx(0.5).epsilon(1e-12));
    // joints are C2: value/dr/dr2 all continuous at t = 1 and t = 2
    for (double t : {1.0, 2.0}) {
        const CutoffValue lo = cutoff_u(t * sg * (1.0 - 1e-9), s, gamma);
        const CutoffValue hi = cutoff_u(t * sg * (1.0 + 1e-9), s, gamma);
        CHECK(std::fabs(lo.value - hi.value) < 1e-7);
        CHECK(std::fabs(lo.dr - hi.dr) * sg < 1e-6);
        CHECK(std::fabs(lo.dr2 - hi.dr2) * sg * sg < 1e-5);
    }
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i)
        sup = std::max(sup, cutoff_u(sg * (1.0 + i / 4000.0), s, gamma).dr);
    CHECK(sup * sg == doctest::Approx(15.0 / 8.0).epsilon(1e-9));
    CHECK_THROWS_AS(cutoff_u(0.0, s, gamma), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    GlueParams p = base_params();
    CHECK_NOTHROW(p.validate());
    p.mu = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    p.delta = 0.3;  // violates delta < (1-gamma)/gamma = 0.25
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_NOTHROW(p.validate(false));  // relaxed mode skips only that check
    p = base_params();
    p.R = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("envelope derivative ledger: each derivative lowers the exponent by one") {
    const GlueParams p = base_params();
    const double s = 1e-4;
    const auto env = build_envelopes(p, s);
    for (const char* name : {"alpha", "A", "beta", "B", "E", "zeta_s", "theta_s", "xi", "eta"})
        REQUIRE(env.count(name) == 1);
    const Envelope& a = env.at("A");
    for (double r : {0.01, 0.3}) {
        CHECK(a.at(r, 1) == doctest::Approx(a.at(r) / r).epsilon(1e-13));
        CHECK(a.at(r, 2) == doctest::Approx(a.at(r) / (r * r)).epsilon(1e-13));
    }
    // residual envelopes carry the s^{-nu'} normalization
    CHECK(env.at("zeta_s").at(1.0) == doctest::Approx(std::pow(s, -p.nu_prime)).epsilon(1e-13));
}

TEST_CASE("inadmissible scales are rejected") {
    GlueParams p = base_params();
    CHECK_THROWS_AS(build_envelopes(p, 0.4), InadmissibleScale);  // 2 s^gamma >= epsilon
    p.R = 50.0;
    CHECK_THROWS_AS(build_envelopes(p, 1e-4), InadmissibleScale);  // s R' >= s^gamma
    // a scan whose admissible grid never reaches 8 points throws too
    CHECK_THROWS_AS(glue_scan(p, 1e-4, 1e-1), InadmissibleScale);
}

TEST_CASE("exponent fit: exact power laws and failure modes") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 10; ++i) {
        const double s = std::pow(10.0, -2.0 - 0.25 * i);
        pts.push_back({s, 3.0 * std::pow(s, 2.5)});
    }
    const ExponentFit f = fit_exponent(pts);
    CHECK(std::fabs(f.slope - 2.5) < 1e-12);
    CHECK(f.width < 1e-12);

    // two-power data: the smaller exponent dominates as s -> 0
    std::vector<std::pair<double, double>> two;
    for (int i = 0; i < 10; ++i) {
        const double s = std::pow(10.0, -6.0 - 0.25 * i);
        two.push_back({s, std::pow(s, 2.0) + std::pow(s, 3.0)});
    }
    CHECK(std::fabs(fit_exponent(two).slope - 2.0) < 1e-4);

    CHECK_THROWS_AS(fit_exponent({{1e-2, 1.0}}), std::invalid_argument);  // < 8 points
    pts[3].second = 0.0;
    CHECK_THROWS_AS(fit_exponent(pts), NonPositiveValue);
}

TEST_CASE("predicted exponents for the reference parameters") {
    const GlueParams p = base_params();  // mu 1, nu' -4, delta 0.2, gamma 0.8
    const PredictedExponents e = predicted_exponents(p);
    CHECK(e.c0 == doctest::Approx(0.76).epsilon(1e-13));  // inner term 3(1-g) + d g
    CHECK(e.l2 == doctest::Approx(0.76 + 3.5 * 0.8).epsilon(1e-13));
    CHECK(e.l14 == doctest::Approx(0.76 - 0.5 * 0.8).epsilon(1e-13));
}

TEST_CASE("region combination: max for C0, p-norm stacking for L2 and L14") {
    const GlueParams p = base_params();
    const std::vector<double> grid = {1e-4, 3e-5};
    const std::vector<NormReport> reps = chi_norm_scan(p, grid);
    for (double s : grid) {
        double c0 = 0.0, l2sq = 0.0, l14p = 0.0;
        for (const NormReport& r : reps) {
            if (r.s != s) continue;
            c0 = std::max(c0, r.c0);
            l2sq += r.l2 * r.l2;
            l14p += std::pow(r.l14, 14.0);
        }
        const NormReport tot = combine_regions(reps, s);
        CHECK(tot.c0 == doctest::Approx(c0).epsilon(1e-10));
        CHECK(tot.l2 == doctest::Approx(std::sqrt(l2sq)).epsilon(1e-10));
        CHECK(tot.l14 == doctest::Approx(std::pow(l14p, 1.0 / 14.0)).epsilon(1e-10));
    }
}

TEST_CASE("total norms decrease monotonically with s") {
    const GlueParams p = base_params();
    const std::vector<double> grid = admissible_grid(p, 1e-6, 1e-3);
    const std::vector<NormReport> reps = chi_norm_scan(p, grid);
    NormReport prev = combine_regions(reps, grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const NormReport cur = combine_regions(reps, grid[i]);
        CHECK(cur.c0 > prev.c0);  // grid is ascending in s, norms grow with s
        CHECK(cur.l2 > prev.l2);
        CHECK(cur.l14 > prev.l14);
        prev = cur;
    }
}

TEST_CASE("scan driver converges to the predicted slopes") {
    const GlueParams p = base_params();
    const GlueScanResult res = glue_scan(p);
    CHECK(res.converged);
    CHECK(std::fabs(res.c0.slope - res.predicted.c0) < 0.05);
    CHECK(std::fabs(res.l2.slope - res.predicted.l2) < 0.05);
    CHECK(std::fabs(res.l14.slope - res.predicted.l14) < 0.05);
    CHECK(res.window_hi <= 1e-1);
    CHECK(res.s_grid.size() >= 8);
}

TEST_CASE("delta constraint controls which mechanism dominates the C0 slope") {
    // With delta < (1-gamma)/gamma the inner-region term 3(1-gamma)+delta*gamma
    // is the smallest exponent and sets the rate.
    GlueParams p = base_params();
    REQUIRE(predicted_exponents(p).c0 == doctest::Approx(0.76));
    CHECK(3.0 * (1.0 - p.gamma) + p.delta * p.gamma < p.gamma * p.mu);

    // Violating it (delta = 0.9, relaxed validation) pushes that term above the
    // decay terms: the dominant exponent flips to gamma*mu = -nu'(1-gamma) = 0.8
    // and the measured slope follows the new dominant mechanism.
    p.delta = 0.9;
    CHECK(predicted_exponents(p).c0 == doctest::Approx(0.8));
    const std::vector<double> grid = admissible_grid(p, 1e-7, 1e-4);
    std::vector<std::pair<double, double>> pts;
    const std::vector<NormReport> reps = chi_norm_scan(p, grid, false);
    for (double s : grid) pts.push_back({s, combine_regions(reps, s).c0});
    const double slope = fit_exponent(pts).slope;
    CHECK(std::fabs(slope - 0.8) < 0.05);
    CHECK(std::fabs(slope - 0.76) > 0.03);  // clearly not the old mechanism
}

TEST_CASE("feasibility region: bounds, caps, and the reference examples") {
    const FeasibilityRegion F = feasibility_region(1.0, -4.0, 0.2);
    CHECK(F.kappa_max == doctest::Approx(0.2));  // min(delta, 1/2, mu)
    // kappa -> 0+ limit of the gamma lower bound: max(7/(7+2mu), 1/(1+2delta))
    CHECK(F.gamma_lb(1e-12) == doctest::Approx(7.0 / 9.0).epsilon(1e-9));
    CHECK(F.gamma_lb_nu(0.1) == doctest::Approx(0.8));
    // nonempty exactly below kappa_max
    CHECK(F.kappa_feasible(0.2 - 1e-6));
    CHECK(!F.kappa_feasible(0.2 + 1e-6));
    CHECK(!F.kappa_feasible(0.0));
    CHECK(F.feasible(0.9, 0.1));
    CHECK(!F.feasible(0.5, 0.1));  // below the gamma lower bound

    // nu' = -7/2 kills the region entirely: the kappa cap collapses to 0
    const FeasibilityRegion empty = feasibility_region(1.0, -3.5, 0.2);
    CHECK(empty.kappa_cap_nu() == 0.0);
    for (double kappa : {1e-6, 0.05, 0.19})
        CHECK(!empty.kappa_feasible(kappa));
}

TEST_CASE("Joyce gate: threshold is positive and the gate holds below it") {
    const GlueParams p = [] {
        GlueParams q = base_params();
        q.kappa = 0.05;  // must not exceed any of the slack margins
        return q;
    }();
    const RegionConstants C;
    const double s0 = joyce_threshold(p, 1.0, 1.0, 1.0, 1e-8, 0.5, C);
    CHECK(s0 > 0.0);
    const PredictedExponents e = predicted_exponents(p);
    for (double s : {s0 / 2.0, s0 / 10.0}) {
        const NormReport n{s, Region::outer, std::pow(s, e.c0), std::pow(s, e.l2),
                           std::pow(s, e.l14)};
        CHECK(joyce_gate(p, s, 1.0, 1.0, 1.0, n, C).all());
    }
}
