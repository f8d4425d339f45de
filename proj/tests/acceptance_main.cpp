// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Criteria can be selected by number on the command line (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hardy/bellman.hpp"
#include "hardy/control.hpp"
#include "hardy/hardy_check.hpp"
#include "hardy/instance_io.hpp"
#include "hardy/probe.hpp"
#include "hardy/rng.hpp"
#include "hardy/tree.hpp"
#include "support/oracles.hpp"
#include "support/sampling.hpp"

using namespace hardy;

namespace {

struct Outcome {
    bool pass = true;
    long checks = 0;
    long failures = 0;
    std::string detail;

    void require(bool ok, const char* what = nullptr) {
        ++checks;
        if (!ok) {
            ++failures;
            pass = false;
            if (what && detail.size() < 400) {
                if (!detail.empty()) detail += "; ";
                detail += what;
            }
        }
    }
};

// ---------------------------------------------------------------- criterion 1
Outcome boundsSuite() {
    Outcome out;
    for (double p : sampling::pGrid()) {
        const Exponent e(p);
        for (int rep = 0; rep < 100000; ++rep) {
            Stream st(static_cast<std::uint64_t>(p * 1000), rep);
            const BellmanPoint x = sampling::domainPoint(st, e);
            const double B = bellmanValueUnchecked(x, e);
            const double scale = std::max(1.0, e.cP * x.F);
            out.require(B >= -1e-12 * scale, "B < 0");
            out.require(e.cP * x.F - B >= -1e-12 * scale, "B > C(p) F");
        }
    }
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome spectrumSuite() {
    Outcome out;
    int done = 0;
    for (int rep = 0; done < 1000; ++rep) {
        Stream st(2ull << 20, rep);
        const Exponent e(sampling::pGrid()[rep % sampling::pGrid().size()]);
        BellmanPoint x = sampling::domainPoint(st, e, 0.1, 10.0);
        const double fEdge = 1e-8 * std::pow(x.F * std::pow(x.v, e.p - 1.0), 1.0 / e.p);
        if (e.p < 2.0 && x.f < fEdge) continue;  // singular edge excluded for p < 2
        ++done;
        const auto H = bellmanDerivatives(x, e).hess;
        const auto eig = oracle::eigenSpectrum(H);
        const auto spec = hessianSpectrum(x, e);
        const double norm = oracle::hessNorm(H);
        out.require(spec[0] <= 0.0, "extreme eigenvalue > 0");
        out.require(std::abs(eig[1]) <= 1e-8 * norm, "second eigenvalue not ~0");
        out.require(std::abs(eig[2]) <= 1e-8 * norm, "third eigenvalue not ~0");
        out.require(std::abs(eig[3]) <= 1e-8 * norm, "fourth eigenvalue not ~0");
        out.require(oracle::relErr(spec[0], eig[0]) < 1e-6, "closed form vs eigensolver");
    }
    // Spot value at p=2, (.,1,1,1): the eigensolver oracle gives -6 = trace of
    // the rank-one Hessian.
    const Exponent e2(2.0);
    const auto spot = hessianSpectrum({1, 1, 1, 1}, e2);
    out.require(std::abs(spot[0] - (-6.0)) <= 1e-12, "spot value at p=2");
    const auto eigSpot = oracle::eigenSpectrum(bellmanDerivatives({1, 1, 1, 1}, e2).hess);
    out.require(std::abs(eigSpot[0] - (-6.0)) <= 1e-12, "eigensolver spot value at p=2");
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome midpointSuite() {
    Outcome out;
    for (double p : sampling::pGrid()) {
        const Exponent e(p);
        long skipped = 0;
        for (int rep = 0; rep < 100000; ++rep) {
            Stream st(static_cast<std::uint64_t>(p * 3000), rep);
            const auto t = sampling::midpointTuple(st, e);
            const BellmanPoint x = composeMidpoint(t.xm, t.xp, t.a, t.b, t.c, e);
            if (!inDomain(x, e).ok()) {  // headroom rounding can spill over
                ++skipped;
                continue;
            }
            const double margin = midpointMargin(t.xm, t.xp, t.a, t.b, t.c, e,
                                                 MarginKind::Strong);
            const double scale = std::max({1.0, std::abs(bellmanValueUnchecked(x, e)),
                                           std::abs(bellmanValueUnchecked(t.xm, e)),
                                           std::abs(bellmanValueUnchecked(t.xp, e))});
            out.require(margin >= -1e-9 * scale, "strong midpoint margin");
        }
        out.require(skipped < 1000, "sampler rejected too many tuples");
    }
    for (int rep = 0; rep < 1000; ++rep) {
        Stream st(3100, rep);
        const Exponent e(sampling::pGrid()[rep % sampling::pGrid().size()]);
        const double a = st.logUniform(0.1, 10), b = st.logUniform(0.1, 10);
        const double yt = midpointScalarMinimizer(a, b, e);
        const double scale = std::max(1.0, e.cP * std::pow(b, e.p));
        out.require(std::abs(midpointScalarGap(yt, a, b, e)) <= 1e-10 * scale,
                    "scalar minimum not zero");
    }
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome theoremSuite() {
    Outcome out;
    for (double p : sampling::pGrid()) {
        const Exponent e(p);
        for (int inst = 0; inst < 100; ++inst) {
            Stream st(static_cast<std::uint64_t>(p * 4000), inst);
            const int depth = static_cast<int>(st.below(11));
            const TreeInstance tree = sampling::randomInstance(st, depth, e, true);

            const TelescopeReport rep = telescopingReplay(tree, e);
            out.require(rep.minMargin >= -1e-9 * std::max(1.0, rep.rootUpperBound),
                        "telescoping margin");
            out.require(rep.holds(1e-9), "telescoping chain");

            for (int trial = 0; trial < 100; ++trial) {
                std::vector<double> phi(tree.nodeCount());
                bool any = false;
                for (double& x : phi) {
                    x = st.uniform() < 0.1 ? 0.0 : st.logUniform(0.1, 10.0);
                    any = any || x > 0;
                }
                if (!any) phi[0] = 1.0;
                const double ratio = hardyRatio(tree.withPhi(phi), e);
                out.require(ratio <= e.cP * (1.0 + 1e-9), "ratio above C(p)");
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome necessitySuite() {
    Outcome out;
    for (int rep = 0; rep < 100; ++rep) {
        Stream st(5000, rep);
        const Exponent e(sampling::pGrid()[rep % sampling::pGrid().size()]);
        const int depth = static_cast<int>(st.below(8));
        const TreeInstance tree = sampling::randomInstance(st, depth, e, false);
        const NodeAggregates agg = computeAggregates(tree, e);
        for (NodeId i = 1; i <= tree.nodeCount(); ++i) {
            const auto [lhs, rhs] = necessityIdentity(tree, e, i);
            out.require(oracle::relErr(lhs, agg.A[i - 1]) < 1e-12, "lhs != A");
            out.require(oracle::relErr(rhs, agg.v[i - 1]) < 1e-12, "rhs != v");
        }
        if (depth <= 4) {
            const auto brute = oracle::bruteAggregates(tree, e);
            for (NodeId i = 1; i <= tree.nodeCount(); ++i) {
                const auto [lhs, rhs] = necessityIdentity(tree, e, i);
                out.require(oracle::relErr(lhs, brute[i - 1].A) < 1e-12, "lhs != brute A");
                out.require(oracle::relErr(rhs, brute[i - 1].v) < 1e-12, "rhs != brute v");
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome dualitySuite() {
    Outcome out;
    for (int rep = 0; rep < 200; ++rep) {
        Stream st(6000, rep);
        const Exponent e(sampling::pGrid()[rep % sampling::pGrid().size()]);
        const int depth = static_cast<int>(st.below(9));
        const TreeInstance tree = sampling::randomInstance(st, depth, e, false, 0.0);
        std::vector<double> eta(tree.nodeCount()), psi(tree.nodeCount());
        for (double& x : eta) x = st.uniform(-2, 2);
        for (double& x : psi) x = st.uniform(-2, 2);
        const double paired = oracle::bruteAdjointPairing(eta, psi, tree);
        out.require(std::abs(adjointnessGap(eta, psi, tree)) <=
                        1e-12 * std::max(1.0, std::abs(paired)),
                    "adjointness gap");
    }

    MaximizeOptions opts;
    opts.iters = 3000;
    opts.multistarts = 16;
    for (int depth = 0; depth <= 3; ++depth) {
        for (double p : sampling::pGrid()) {
            const Exponent e(p);
            Stream st(6100, static_cast<std::uint64_t>(depth * 100 + p * 4));
            const TreeInstance tree = sampling::randomInstance(st, depth, e, true, 0.0);
            const MaximizeResult primal = maximizeRatio(tree, e, opts, 61);
            const std::vector<double> warm = dualCertificate(tree, e, primal.arg);
            const MaximizeResult dual = maximizeDualRatio(tree, e, opts, 62, &warm);
            const double lhs = std::pow(dual.ratio, 1.0 / e.pConj);
            const double rhs = std::pow(primal.ratio, 1.0 / e.p);
            out.require(std::abs(lhs - rhs) <= 1e-3 * std::max(1.0, rhs),
                        "operator-norm duality");
        }
    }
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome lowerValueSuite() {
    Outcome out;
    for (int rep = 0; rep < 10000; ++rep) {
        Stream st(7000, rep);
        const Exponent e(sampling::pGrid()[rep % sampling::pGrid().size()]);
        const BellmanPoint x = sampling::domainPoint(st, e);
        const double closed = optimalValueClosedForm(x, e);
        const double direct = bellmanValue(x, e);
        out.require(std::abs(closed - direct) <= 1e-10 * std::max(1.0, std::abs(direct)),
                    "closed form != B");
    }

    const Exponent e2(2.0);
    const ControlPolicy drift = ControlPolicy::driftOnly();
    double prevErr = 1e300;
    bool decreasing = true;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const ValueEstimate est = estimateValue({1, 1, 1, 1}, drift, e2, h, 2.0, 2, 11);
        const double err = std::abs(est.mean - 2.0);
        if (h == 1e-3) out.require(err <= 0.05, "|J_h - 2| > 0.05 at h=1e-3");
        decreasing = decreasing && err < prevErr;
        prevErr = err;
    }
    out.require(decreasing, "Euler error not decreasing in h");
    return out;
}

// ---------------------------------------------------------------- criterion 8
namespace {
// Starts sit a few diffusion standard deviations inside every face, so the
// O(sqrt(h)) grid-exit skim stays inside the Monte Carlo band.
BellmanPoint mcStart(Stream& st, const Exponent& e) {
    const double v = st.logUniform(0.7, 2.5);
    const double A = v * st.uniform(0.3, 0.6);
    const double F = st.logUniform(0.7, 2.5);
    const double f =
        std::pow(F * std::pow(v, e.p - 1.0), 1.0 / e.p) * st.uniform(0.3, 0.6);
    return {F, f, A, v};
}
} // namespace

Outcome upperValueSuite() {
    Outcome out;
    const double h = 1e-3, horizon = 1.0;
    const std::size_t nPaths = 10000;
    int satisfied = 0, cases = 0;
    for (int pt = 0; pt < 20; ++pt) {
        const Exponent e(sampling::pGrid()[pt % sampling::pGrid().size()]);
        Stream st(8000, pt);
        const BellmanPoint x0 = mcStart(st, e);
        const double B0 = bellmanValue(x0, e);
        for (int pol = 0; pol < 10; ++pol) {
            const ControlPolicy policy = sampling::randomPolicy(st, horizon);
            const ValueEstimate est =
                estimateValue(x0, policy, e, h, horizon, nPaths,
                              counterWord(8000, pt, pol, 0));
            ++cases;
            if (est.mean <= B0 + 3.0 * est.standardError) ++satisfied;
        }
    }
    out.checks = cases;
    out.require(satisfied >= 198, "mean J <= B + 3 SE in < 99% of cases");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d/%d cases satisfied", satisfied, cases);
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome hjbSuite() {
    Outcome out;
    std::vector<ControlVector> grid(1000);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Stream st(9000, k);
        // ||u|| <= 10
        grid[k] = ControlVector{st.uniform(-4, 4), st.uniform(-4, 4), st.uniform(-4, 4),
                                st.uniform(-4, 4), st.uniform(0, 4)};
    }
    int done = 0;
    for (int rep = 0; done < 1000; ++rep) {
        Stream st(9100, rep);
        const Exponent e(sampling::pGrid()[rep % sampling::pGrid().size()]);
        BellmanPoint x = sampling::domainPoint(st, e, 0.1, 10.0);
        const double fEdge = 1e-8 * std::pow(x.F * std::pow(x.v, e.p - 1.0), 1.0 / e.p);
        if (e.p < 2.0 && x.f < fEdge) continue;
        ++done;

        const BellmanDerivatives der = bellmanDerivatives(x, e);
        double scale = std::max(1.0, std::abs(der.grad[2]) * 4.0);
        for (int a = 1; a < 4; ++a)
            for (int b = 1; b < 4; ++b) scale = std::max(scale, std::abs(der.hess[a][b]) * 16.0);

        const HjbScan scan = hjbResidual(x, e, grid);
        out.require(scan.maxResidual <= 1e-9 * scale, "residual above tolerance");

        const double u5 = Stream(9200, rep).uniform(0.0, 3.0);
        const ControlVector driftU{0, 0, 0, 0, u5};
        const HjbScan ds = hjbResidual(x, e, std::span<const ControlVector>(&driftU, 1));
        const double driftScale = std::max(1.0, std::abs(der.grad[2] * u5));
        out.require(std::abs(ds.maxResidual) <= 1e-12 * driftScale, "drift residual not zero");

        const double lhs = payoffDensity(x, u5, e);
        const double rhs = der.grad[2] * u5;
        out.require(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)),
                    "payoff density != dB/dA u5");
    }
    return out;
}

// --------------------------------------------------------------- criterion 10
Outcome probeSuite() {
    Outcome out;
    MaximizeOptions opts;
    opts.iters = 1500;
    opts.multistarts = 6;
    std::vector<CsvRow> rows;
    std::printf("    %-9s %-5s %-10s %-12s %-12s %s\n", "p", "depth", "family", "ratio", "C(p)",
                "ratio/C(p)");
    for (int depth = 0; depth <= 10; ++depth) {
        for (LambdaFamily family :
             {LambdaFamily::Uniform, LambdaFamily::Geometric, LambdaFamily::Random}) {
            for (const SweepRow& r : pSweep(depth, family, sampling::pGrid(), 10, opts)) {
                out.require(r.ratio <= r.cP * (1.0 + 1e-9), "ratio above C(p)");
                rows.push_back(CsvRow{r.p, static_cast<long long>(r.depth), r.family, r.ratio,
                                      r.cP, r.fraction});
                if (family == LambdaFamily::Uniform)
                    std::printf("    %-9g %-5d %-10s %-12.8g %-12.8g %.8f\n", r.p, r.depth,
                                r.family.c_str(), r.ratio, r.cP, r.fraction);
            }
        }
    }
    emitCsvFile({"p", "depth", "family", "ratio", "cP", "fraction"}, rows,
                "acceptance_probe.csv");
    out.detail = "gap trend archived in acceptance_probe.csv";
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double budgetSeconds;  // 0 = no budget
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    const std::vector<Criterion> criteria{
        {1, "bounds 0 <= B <= C(p) F", 10, boundsSuite},
        {2, "Hessian spectrum {0,0,0,extreme}", 5, spectrumSuite},
        {3, "midpoint inequality margins", 30, midpointSuite},
        {4, "inequality on testing-condition instances", 60, theoremSuite},
        {5, "necessity identity (A, v)", 5, necessitySuite},
        {6, "duality: adjointness and operator norms", 60, dualitySuite},
        {7, "value lower bound: closed form and Euler", 30, lowerValueSuite},
        {8, "value upper bound: mean J <= B + 3 SE", 600, upperValueSuite},
        {9, "HJB residuals and payoff identity", 30, hjbSuite},
        {10, "sharpness probe (report)", 0, probeSuite},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool timeOk = c.budgetSeconds == 0 || secs < c.budgetSeconds;
        const bool pass = out.pass && timeOk;
        std::printf("[%s] criterion %2d: %s (%ld checks, %.2f s%s)%s%s\n",
                    pass ? "PASS" : "FAIL", c.id, c.name, out.checks, secs,
                    timeOk ? "" : ", over budget", out.detail.empty() ? "" : " - ",
                    out.detail.c_str());
        if (!pass) ++failures;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
