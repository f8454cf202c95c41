// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "g2glue/runner.hpp"

using namespace g2glue;

namespace {

int g_failures = 0;

void criterion(int n, const std::string& label, bool pass, const std::string& detail = "") {
    std::printf("CRITERION %d: %s — %s%s%s\n", n, pass ? "PASS" : "FAIL", label.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    if (!pass) ++g_failures;
}

// All checks whose name contains one of the fragments must exist and pass.
bool subset_passes(const SuiteReport& rep, const std::vector<std::string>& fragments,
                   std::string* why = nullptr) {
    bool ok = true;
    for (const std::string& frag : fragments) {
        bool found = false;
        for (const CheckResult& c : rep.checks) {
            if (c.name.find(frag) == std::string::npos) continue;
            found = true;
            if (!c.pass) {
                ok = false;
                if (why) *why += c.name + " FAILED (" + c.detail + "); ";
            }
        }
        if (!found) {
            ok = false;
            if (why) *why += "missing check '" + frag + "'; ";
        }
    }
    return ok;
}

}  // namespace

int main() {
    const LinkAlgebra link = preset_s3xs3();

    // 1-2: pointwise G2 algebra and quadratic remainder control.
    {
        const SuiteReport rep = suite_pointwise(42);
        std::string why1, why2;
        criterion(1, "G2 algebra: metric recovery, (1,7,27) split, J identities",
                  subset_passes(rep,
                                {"metric_from_3form", "projection dimensions",
                                 "pi1+pi7+pi27", "J(psi0)", "J(*xi)"},
                                &why1),
                  why1);
        criterion(2, "quadratic remainders and Theta linearization",
                  subset_passes(rep, {"F(0) = 0", "vary < 10%", "FD derivative"}, &why2),
                  why2);
    }

    // 3: nearly Kahler solve.
    {
        const SuiteReport rep = suite_link(link);
        std::string why;
        criterion(3, "nearly Kahler solve: residual < 1e-10, no harmonic 1-forms",
                  subset_passes(rep,
                                {"solve residual", "harmonic 1-forms", "d(omega)",
                                 "d(ImOmega)"},
                                &why),
                  why);
    }

    // 4: cone structure and convention lock.
    {
        const SuiteReport rep = suite_cone(link);
        std::string why;
        criterion(4, "cone structure: closed, dual, exact, Theta convention lock",
                  subset_passes(rep,
                                {"d(phi_C) = 0", "d(psi_C) = 0", "*phi_C = psi_C",
                                 "d(-r^3 omega/3)", "d(-r^4 ImOmega/4)",
                                 "Theta(phi_C|r=1)"},
                                &why),
                  why);
    }

    // 5-7: rate analysis.
    {
        const SuiteReport rep = suite_rates_full(link);
        std::string why5, why6, why7;
        criterion(5, "excluded rate ranges empty; function boundary rates 0/-5 critical",
                  subset_passes(rep, {"excluded range", "boundary rates 0 and -5"}, &why5),
                  why5);
        criterion(6, "order -3 kernel: 2-dim, dr ^ harmonic, type 27, log-free; -4 empty",
                  subset_passes(rep,
                                {"single even-parity critical rate",
                                 "2-dimensional with log-chain 0",
                                 "dr ^ (invariant harmonic 3-forms)", "pure type 27",
                                 "pure 4-form kernel at -4"},
                                &why6),
                  why6);
        criterion(7, "eigenvalue identity (lambda+k)(lambda-k+7) at critical rates",
                  subset_passes(rep, {"eigenvalue identity"}, &why7), why7);
    }

    // 8: glue exponent fits for three parameter sets.
    {
        struct Set {
            double mu, nu_prime, delta, gamma;
        };
        const Set sets[] = {{1.0, -4.0, 0.2, 0.8}, {0.5, -4.0, 0.1, 0.9}, {2.0, -4.0, 0.3, 0.7}};
        bool ok = true;
        std::string why;
        for (const Set& s : sets) {
            GlueParams p;
            p.mu = s.mu;
            p.nu = -4.0;
            p.nu_prime = s.nu_prime;
            p.delta = s.delta;
            p.gamma = s.gamma;
            p.R = 1.01;  // keep the scan window admissible
            const SuiteReport rep = suite_glue_scan(p, 0.05);
            std::string w;
            if (!subset_passes(rep, {"C0 slope", "L2 slope", "L14 slope"}, &w)) {
                ok = false;
                why += "(gamma=" + std::to_string(s.gamma) + ") " + w;
            }
        }
        criterion(8, "fitted C0/L2/L14 slopes within 0.05 of predictions (3 parameter sets)",
                  ok, why);
    }

    // 9: feasibility region.
    {
        const SuiteReport rep = suite_feasibility(1.0, -4.0, 0.2);
        std::string why;
        bool ok = subset_passes(rep, {"region nonempty exactly", "L2 inequality dominates"},
                                &why);

        // Boundary curves match their closed forms to 1e-9.
        const FeasibilityRegion fr = feasibility_region(1.0, -4.0, 0.2);
        for (double kappa : {0.01, 0.1, 0.19}) {
            const double e1 = std::fabs(fr.gamma_lb_mu(kappa) - (3.5 + kappa) / (3.5 + 1.0));
            const double e2 = std::fabs(fr.gamma_lb_nu(kappa) - (1.0 + kappa / (3.5 - 4.0)));
            const double e3 =
                std::fabs(fr.gamma_lb_delta(kappa) - (1.0 + 2.0 * kappa) / (1.0 + 2.0 * 0.2));
            if (e1 > 1e-9 || e2 > 1e-9 || e3 > 1e-9) {
                ok = false;
                why += "boundary curve mismatch at kappa=" + std::to_string(kappa) + "; ";
            }
        }

        // nu' = -3.5 empties the region for every kappa > 0.
        const FeasibilityRegion empty = feasibility_region(1.0, -3.5, 0.2);
        for (double kappa : {1e-6, 0.05, 0.15, 0.199}) {
            if (empty.kappa_feasible(kappa)) {
                ok = false;
                why += "nu'=-3.5 region not empty at kappa=" + std::to_string(kappa) + "; ";
            }
        }
        criterion(9, "feasibility: nonempty iff 0<kappa<min(delta,1/2,mu); nu'=-3.5 empty",
                  ok, why);
    }

    // 10: Joyce gate.
    {
        GlueParams p;
        p.mu = 1.0;
        p.nu = -4.0;
        p.nu_prime = -4.0;
        p.delta = 0.2;
        p.gamma = 0.8;
        p.R = 1.01;
        p.kappa = 0.05;
        const SuiteReport rep = suite_joyce(p, 1.0, 1.0, 1.0);
        std::string why;
        criterion(10, "Joyce gate: threshold s0 > 0, hypotheses hold below, outer dominance",
                  subset_passes(rep,
                                {"threshold s0", "hypotheses hold below",
                                 "curvature model", "injectivity model"},
                                &why),
                  why);
    }

    if (g_failures) std::printf("%d criterion/criteria FAILED\n", g_failures);
    return g_failures ? 1 : 0;
}
