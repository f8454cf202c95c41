#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "g2glue/g2_pointwise.hpp"

using namespace g2glue;

namespace {

std::mt19937_64 rng(42);

Form random_form(int k) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Form f(7, k);
    for (int i = 0; i < f.c.size(); ++i) f.c[i] = gauss(rng);
    return f;
}

Form unit(Form f) { return f * (1.0 / f.c.norm()); }

}  // namespace

TEST_CASE("metric recovery from the reference 3-form") {
    const Metric7 m = metric_from_3form(standard_phi0());
    CHECK((m.g - Eigen::Matrix<double, 7, 7>::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(m.signed_volume() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("metric recovery is invariant under rescaling phi -> t^3 phi up to t^2") {
    const Form phi = standard_phi0();
    const double t = 1.7;
    const Metric7 m = metric_from_3form(phi * (t * t * t));
    CHECK((m.g - t * t * Eigen::Matrix<double, 7, 7>::Identity()).cwiseAbs().maxCoeff() <
          1e-11);
}

TEST_CASE("degenerate 3-forms are rejected") {
    CHECK_THROWS_AS(metric_from_3form(Form(7, 3)), NotPositive);
    Form decomposable(7, 3);  // e1^e2^e3 alone induces a singular bilinear form
    decomposable.c[0] = 1.0;
    CHECK_THROWS_AS(metric_from_3form(decomposable), NotPositive);
}

TEST_CASE("Theta maps the reference form to its dual 4-form") {
    const G2Structure s = standard_g2();
    CHECK((theta(s.phi) - s.psi).c.cwiseAbs().maxCoeff() < 1e-13);
    // *psi = phi
    CHECK((hodge_star(s.metric, s.psi) - s.phi).c.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("type projectors: dimensions, idempotence, resolution of identity") {
    const G2Structure s = standard_g2();
    const TypeProjectors P = make_projectors(s);
    CHECK(P.p1.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(P.p7.trace() == doctest::Approx(7.0).epsilon(1e-10));
    CHECK(P.p27.trace() == doctest::Approx(27.0).epsilon(1e-10));
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(35, 35);
    CHECK((P.p1 * P.p1 - P.p1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P.p7 * P.p7 - P.p7).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P.p27 * P.p27 - P.p27).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P.p1 + P.p7 + P.p27 - I).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P.p1 * P.p7).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P.p7 * P.p27).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("phi is pure type 1 and the projections split random forms") {
    const G2Structure s = standard_g2();
    const Split3 p = project3(s, s.phi);
    CHECK((p.pi1 - s.phi).c.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(p.pi7.c.norm() < 1e-12);
    CHECK(p.pi27.c.norm() < 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
        const Form x = unit(random_form(3));
        const Split3 q = project3(s, x);
        CHECK((q.pi1 + q.pi7 + q.pi27 - x).c.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("degree-4 projections are the star duals of the degree-3 ones") {
    const G2Structure s = standard_g2();
    for (int trial = 0; trial < 10; ++trial) {
        const Form x = unit(random_form(3));
        const Split3 p3 = project3(s, x);
        const Split3 p4 = project4(s, hodge_star(s.metric, x));
        CHECK((p4.pi27 - hodge_star(s.metric, p3.pi27)).c.cwiseAbs().maxCoeff() < 1e-12);
        CHECK((p4.pi7 - hodge_star(s.metric, p3.pi7)).c.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("J map: reference value and action on type 27") {
    const G2Structure s = standard_g2();
    CHECK((j_map(s, s.psi) - s.phi * 0.75).c.cwiseAbs().maxCoeff() < 1e-12);
    const TypeProjectors P = make_projectors(s);
    for (int trial = 0; trial < 10; ++trial) {
        Form x(7, 3);
        x.c = P.p27 * random_form(3).c;
        x = unit(x);
        CHECK((j_map(s, hodge_star(s.metric, x)) + x).c.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("theta_inverse inverts Theta near the reference structure") {
    const G2Structure s = standard_g2();
    for (int trial = 0; trial < 5; ++trial) {
        const Form phi = s.phi + unit(random_form(3)) * 0.05;
        const Form back = theta_inverse(s, theta(phi));
        CHECK((back - phi).c.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("quadratic remainders vanish to second order") {
    const G2Structure s = standard_g2();
    CHECK(remainder_F(s, Form(7, 3)).c.cwiseAbs().maxCoeff() == 0.0);
    CHECK(remainder_G(s, Form(7, 4)).c.cwiseAbs().maxCoeff() == 0.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Form x3 = unit(random_form(3));
        const Form x4 = unit(random_form(4));
        double lo_f = HUGE_VAL, hi_f = 0.0, lo_g = HUGE_VAL, hi_g = 0.0;
        for (double t : {1e-4, 1e-3, 1e-2}) {
            const double rf = remainder_F(s, x3 * t).c.norm() / (t * t);
            const double rg = remainder_G(s, x4 * t).c.norm() / (t * t);
            lo_f = std::min(lo_f, rf);
            hi_f = std::max(hi_f, rf);
            lo_g = std::min(lo_g, rg);
            hi_g = std::max(hi_g, rg);
        }
        CHECK(hi_f / lo_f - 1.0 < 0.10);
        CHECK(hi_g / lo_g - 1.0 < 0.10);
    }
}

TEST_CASE("linearization of Theta matches a central finite difference") {
    const G2Structure s = standard_g2();
    const double h = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        const Form x = unit(random_form(3));
        const Form fd = (theta(s.phi + x * h) - theta(s.phi - x * h)) * (1.0 / (2.0 * h));
        CHECK((fd - theta_linearization(s, x)).c.cwiseAbs().maxCoeff() < 1e-8);
    }
}
