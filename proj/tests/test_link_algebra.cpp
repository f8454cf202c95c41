#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "g2glue/link_algebra.hpp"
#include "g2glue/nearly_kahler.hpp"

using namespace g2glue;

namespace {

std::mt19937_64 rng(42);

Form random6(int k) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Form f(6, k);
    for (int i = 0; i < f.c.size(); ++i) f.c[i] = gauss(rng);
    return f;
}

}  // namespace

TEST_CASE("d squared vanishes on every degree") {
    const LinkAlgebra alg = preset_s3xs3();
    for (int k = 0; k <= 4; ++k)
        for (int trial = 0; trial < 5; ++trial)
            CHECK(alg.d(alg.d(random6(k))).c.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("d is a graded derivation (Leibniz rule)") {
    const LinkAlgebra alg = preset_s3xs3();
    const Exterior& E = ext6();
    for (int p = 0; p <= 3; ++p) {
        for (int q = 0; p + q <= 5; ++q) {
            const Form a = random6(p), b = random6(q);
            const Form lhs = alg.d(E.wedge(a, b));
            Form rhs = E.wedge(alg.d(a), b);
            rhs += E.wedge(a, alg.d(b)) * (p % 2 == 0 ? 1.0 : -1.0);
            CHECK((lhs - rhs).c.cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("star squared is the degree parity sign in dimension 6") {
    const LinkAlgebra alg = preset_s3xs3();
    for (int k = 0; k <= 6; ++k) {
        const Form w = random6(k);
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        CHECK((alg.star(alg.star(w)) - w * sign).c.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("codifferential is the inner-product adjoint of d") {
    const LinkAlgebra alg = preset_s3xs3();
    for (int k = 0; k <= 5; ++k) {
        const Form a = random6(k), b = random6(k + 1);
        CHECK(alg.inner(alg.d(a), b) ==
              doctest::Approx(alg.inner(a, alg.codiff(b))).epsilon(1e-10));
    }
}

TEST_CASE("Laplacian commutes with star and has nonnegative spectrum") {
    const LinkAlgebra alg = preset_s3xs3();
    for (int k = 0; k <= 6; ++k) {
        const Form w = random6(k);
        CHECK((alg.laplacian(alg.star(w)) - alg.star(alg.laplacian(w))).c.cwiseAbs().maxCoeff() <
              1e-10);
        for (const auto& pair : alg.invariant_spectrum(k)) CHECK(pair.eigenvalue > -1e-10);
    }
}

TEST_CASE("invariant harmonic dimensions on the nearly Kahler presets") {
    const LinkAlgebra alg = preset_s3xs3();
    CHECK(alg.harmonic_representatives(0).size() == 1);
    CHECK(alg.harmonic_representatives(1).size() == 0);
    CHECK(alg.harmonic_representatives(2).size() == 0);
    CHECK(alg.harmonic_representatives(3).size() == 2);
    CHECK(alg.harmonic_representatives(4).size() == 0);
    CHECK(alg.harmonic_representatives(5).size() == 0);
    CHECK(alg.harmonic_representatives(6).size() == 1);

    // Abelian comparison: every invariant form is harmonic.
    const LinkAlgebra flat = preset_abelian6();
    for (int k = 0; k <= 6; ++k)
        CHECK(flat.harmonic_representatives(k).size() ==
              static_cast<std::size_t>(ext6().dim(k)));
}

TEST_CASE("harmonic representatives are closed and coclosed") {
    const LinkAlgebra alg = preset_s3xs3();
    for (const Form& h : alg.harmonic_representatives(3)) {
        CHECK(alg.d(h).c.cwiseAbs().maxCoeff() < 1e-10);
        CHECK(alg.codiff(h).c.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("file parser reproduces the presets") {
    const LinkAlgebra a = load_link_algebra(std::string(DATA_DIR) + "/s3xs3.linkalg");
    const LinkAlgebra b = preset_s3xs3();
    CHECK((a.metric() - b.metric()).norm() == 0.0);
    CHECK(a.orientation() == b.orientation());
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k)
                CHECK(a.structure_constant(i, j, k) == b.structure_constant(i, j, k));

    const LinkAlgebra flat = load_link_algebra(std::string(DATA_DIR) + "/abelian6.linkalg");
    CHECK(flat.total_volume() == doctest::Approx(1.0));
}

TEST_CASE("parser rejects malformed input") {
    std::istringstream bad1("dimension = 5\n");
    CHECK_THROWS_AS(parse_link_algebra(bad1), ConfigParse);
    std::istringstream bad2("metric 0 1 1.0\n");
    CHECK_THROWS_AS(parse_link_algebra(bad2), ConfigParse);
    std::istringstream bad3("frobnicate = 3\n");
    CHECK_THROWS_AS(parse_link_algebra(bad3), ConfigParse);
    CHECK_THROWS_AS(load_link_algebra("/nonexistent/path.linkalg"), IoFailure);
}

TEST_CASE("degenerate metrics and non-Jacobi constants are rejected") {
    CHECK_THROWS_AS(LinkAlgebra::make(LinkAlgebra::Constants{},
                                      Eigen::Matrix<double, 6, 6>::Zero(), 1),
                    MetricNotPositive);
    // [e1,e2] = e3, [e1,e3] = e1 violates the Jacobi identity:
    // the cyclic sum gives [e2,[e3,e1]] = -[e2,e1] = e3 != 0.
    LinkAlgebra::Constants c{};
    c[2][0][1] = 1.0;
    c[2][1][0] = -1.0;
    c[0][0][2] = 1.0;
    c[0][2][0] = -1.0;
    CHECK_THROWS_AS(LinkAlgebra::make(c, Eigen::Matrix<double, 6, 6>::Identity(), 1),
                    JacobiViolation);
}

TEST_CASE("nearly Kahler solve: structure equations hold bit-exactly") {
    const NKSolution nk = solve_nk(preset_s3xs3());
    CHECK(nk.residual < 1e-10);
    const LinkAlgebra& L = nk.algebra;
    const SU3Structure& s = nk.su3;

    // Structure equations of the strictly nearly Kahler link.
    CHECK((L.d(s.omega).c + s.re_omega3.c * 3.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((L.d(s.im_omega3).c - ext6().wedge(s.omega, s.omega).c * 2.0).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((L.star(s.re_omega3) - s.im_omega3).c.cwiseAbs().maxCoeff() < 1e-12);

    // Normalization and primitivity: omega^3/6 = vol; the (3,0)+(0,3) part is
    // primitive and ReOmega ^ ImOmega is a positive multiple of the volume.
    const Form om3 = ext6().wedge(ext6().wedge(s.omega, s.omega), s.omega);
    CHECK((om3 * (1.0 / 6.0) - L.volume_form()).c.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ext6().wedge(s.omega, s.re_omega3).c.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ext6().wedge(s.omega, s.im_omega3).c.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ext6().wedge(s.re_omega3, s.re_omega3).c.cwiseAbs().maxCoeff() < 1e-12);
    const double reim = ext6().wedge(s.re_omega3, s.im_omega3).c[0] / L.vol_coeff();
    CHECK(reim > 0.0);
}

TEST_CASE("nearly Kahler solve: no invariant harmonic 1-forms") {
    const NKSolution nk = solve_nk(preset_s3xs3());
    CHECK(nk.algebra.harmonic_representatives(1).empty());
}

TEST_CASE("abelian link admits no nearly Kahler structure") {
    CHECK_THROWS_AS(solve_nk(preset_abelian6()), NoSolution);
}
