#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "g2glue/nearly_kahler.hpp"
#include "g2glue/rate_analysis.hpp"

using namespace g2glue;

namespace {

std::mt19937_64 rng(42);

const LinkAlgebra& nk_link() {
    static const NKSolution nk = solve_nk(preset_s3xs3());
    return nk.algebra;
}

}  // namespace

TEST_CASE("synthetic pencil: scan finds both planted roots to 1e-9") {
    // (lambda + 0)(lambda + 7) = 1 has roots (-7 ± sqrt(53))/2.
    const RatePencil P = synthetic_eigenvalue_pencil(1.0, 0);
    const CriticalRateSet crs = critical_rates(P, -7.5, 0.5);
    REQUIRE(crs.rates.size() == 2);
    const double r_lo = (-7.0 - std::sqrt(53.0)) / 2.0;
    const double r_hi = (-7.0 + std::sqrt(53.0)) / 2.0;
    CHECK(std::fabs(crs.rates[0].lambda - r_lo) < 1e-9);
    CHECK(std::fabs(crs.rates[1].lambda - r_hi) < 1e-9);
    for (const CriticalRate& cr : crs.rates) {
        CHECK(cr.kernel_dim == 1);
        CHECK(cr.log_chain == 0);  // simple roots carry no log chain
    }
}

TEST_CASE("pencil columns agree with the cone operator it models") {
    const LinkAlgebra& L = nk_link();
    const RatePencil P = assemble_closed_coclosed_pencil(L, 2);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double lambda : {-2.5, 0.75}) {
        Eigen::VectorXd v(P.domain.total);
        for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
        const Order lam = Order::from_double(lambda);
        const ConeForm w = P.domain.unstack(v, lam);
        const ConeForm img = cone_d(L, w) + cone_codiff(L, w);
        const Eigen::VectorXd direct = P.range.stack(img, lam + Order(-1));
        CHECK((P(lambda) * v - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("affine pencils really are affine in lambda") {
    const LinkAlgebra& L = nk_link();
    for (const RatePencil& P :
         {assemble_dirac_pencil(L, Parity::even), assemble_closed_coclosed_pencil(L, 3)}) {
        REQUIRE(P.affine);
        const double l = -1.7;
        CHECK((P(l) - (P.constant + l * P.slope)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("even Dirac system: single critical rate -3 with a 2-dim log-free kernel") {
    const LinkAlgebra& L = nk_link();
    const RatePencil P = assemble_dirac_pencil(L, Parity::even);
    const CriticalRateSet crs = critical_rates(P, -3.5, -2.5);
    REQUIRE(crs.rates.size() == 1);
    CHECK(std::fabs(crs.rates[0].lambda + 3.0) < 1e-9);
    CHECK(crs.rates[0].kernel_dim == 2);
    CHECK(crs.rates[0].log_chain == 0);
}

TEST_CASE("scan refuses windows whose endpoint is itself critical") {
    const LinkAlgebra& L = nk_link();
    const RatePencil P = assemble_dirac_pencil(L, Parity::even);
    CHECK_THROWS_AS(critical_rates(P, -3.0, -2.5), EndpointCritical);
    CHECK_THROWS_AS(critical_rates(P, -2.5, -2.6), std::invalid_argument);  // a >= b
}

TEST_CASE("excluded ranges: clean scans in low degrees, no claim at the middle degree") {
    const LinkAlgebra& L = nk_link();
    const ExcludedRangeReport r0 = excluded_range_report(L, ConeOperator::laplacian, 0);
    CHECK(r0.verified);
    CHECK(r0.lo == -5.0);
    CHECK(r0.hi == 0.0);
    const ExcludedRangeReport r2 = excluded_range_report(L, ConeOperator::closed_coclosed, 2);
    CHECK(r2.verified);
    CHECK(r2.lo == -5.0);
    CHECK(r2.hi == -2.0);
    CHECK_THROWS_AS(excluded_range_report(L, ConeOperator::laplacian, 3), std::invalid_argument);
    CHECK_THROWS_AS(excluded_range_report(L, ConeOperator::laplacian, 4), std::invalid_argument);
    CHECK_THROWS_AS(excluded_range_report(L, ConeOperator::laplacian, 8), std::invalid_argument);
}

TEST_CASE("order -k kernels are pure harmonic link forms") {
    const LinkAlgebra& L = nk_link();
    const MinusKClassification c0 = order_minus_k_classification(L, 0);
    CHECK(c0.kernel_dim == 1);
    CHECK(c0.pass);
    const MinusKClassification c3 = order_minus_k_classification(L, 3);
    CHECK(c3.kernel_dim == 2);
    CHECK(c3.pass);
    CHECK(c3.max_alpha_norm < 1e-9);
    const MinusKClassification c4 = order_minus_k_classification(L, 4);
    CHECK(c4.kernel_dim == 0);  // no harmonic 4-forms on this link
}

TEST_CASE("eigenvalue identity (lambda+k)(lambda-k+7) at every critical rate") {
    const LinkAlgebra& L = nk_link();
    for (int k : {0, 2, 3}) {
        const EigenvalueIdentityReport rep = eigenvalue_identity_check(L, k);
        CHECK(rep.all_pass);
        CHECK(!rep.entries.empty());
        for (const auto& e : rep.entries) CHECK(e.max_residual < 1e-9);
    }
}

TEST_CASE("flat link: function Laplacian rates are exactly the boundary pair {−5, 0}") {
    const LinkAlgebra flat = preset_abelian6();
    const RatePencil P = assemble_laplacian_pencil(flat, 0);
    const CriticalRateSet crs = critical_rates(P, -5.5, 0.5);
    REQUIRE(crs.rates.size() == 2);
    CHECK(std::fabs(crs.rates[0].lambda + 5.0) < 1e-9);
    CHECK(std::fabs(crs.rates[1].lambda - 0.0) < 1e-9);
    CHECK(crs.rates[0].log_chain == -1);  // quadratic pencil: chain length not defined
}
