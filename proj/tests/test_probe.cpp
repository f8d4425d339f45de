#include <doctest.h>

#include <cmath>

#include "hardy/hardy_check.hpp"
#include "hardy/probe.hpp"
#include "support/oracles.hpp"
#include "support/sampling.hpp"

using namespace hardy;

TEST_CASE("saturating weights") {
    SUBCASE("single node") {
        const Exponent e(2.0);
        const std::vector<double> alpha = saturatingAlpha(0, {1.0}, e);
        CHECK(alpha[0] == doctest::Approx(1.0).epsilon(1e-15));
        const NodeAggregates agg =
            computeAggregates(TreeInstance::build(0, alpha, {1.0}, {1.0}), e);
        CHECK(agg.A[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(agg.v[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("uniform lambda at depth 2 saturates every node") {
        const Exponent e(2.0);
        const std::vector<double> lambda = makeLambdaFamily(LambdaFamily::Uniform, 2, 1.5, 0);
        std::vector<NodeId> bad;
        const std::vector<double> alpha = saturatingAlpha(2, lambda, e, &bad);
        CHECK(bad.empty());
        const TreeInstance inst =
            TreeInstance::build(2, alpha, lambda, std::vector<double>(7, 1.0));
        const std::vector<double> m = testingMargins(inst, e);
        const NodeAggregates agg = computeAggregates(inst, e);
        for (std::size_t k = 0; k < m.size(); ++k)
            CHECK(std::abs(m[k]) <= 1e-12 * std::max(1.0, agg.v[k]));
    }
    SUBCASE("random lambda saturates to relative 1e-12") {
        for (int rep = 0; rep < 40; ++rep) {
            Stream st(60000 + rep, 0);
            const Exponent e(sampling::pGrid()[rep % sampling::pGrid().size()]);
            const int depth = static_cast<int>(st.below(8));
            std::vector<double> lambda(nodeCountForDepth(depth));
            for (double& x : lambda) x = st.logUniform(0.25, 4.0);
            std::vector<NodeId> bad;
            const std::vector<double> alpha = saturatingAlpha(depth, lambda, e, &bad);
            CHECK(bad.empty());
            const TreeInstance inst = TreeInstance::build(
                depth, alpha, lambda, std::vector<double>(lambda.size(), 1.0));
            const NodeAggregates agg = computeAggregates(inst, e);
            for (std::size_t k = 0; k < agg.v.size(); ++k)
                CHECK(std::abs(agg.v[k] - agg.A[k]) <= 1e-12 * std::max(1.0, agg.v[k]));
        }
    }
}

TEST_CASE("ratio maximization") {
    MaximizeOptions fast;
    fast.iters = 1500;
    fast.multistarts = 8;

    SUBCASE("single node returns the closed form immediately") {
        Stream st(121, 0);
        for (double p : sampling::pGrid()) {
            const Exponent e(p);
            const double lam = st.logUniform(0.2, 5);
            const std::vector<double> alpha = saturatingAlpha(0, {lam}, e);
            const TreeInstance inst = TreeInstance::build(0, alpha, {lam}, {1.0});
            const MaximizeResult res = maximizeRatio(inst, e, fast, 1);
            CHECK(oracle::relErr(res.ratio, alpha[0] * std::pow(lam, p - 1.0)) < 1e-12);
        }
    }
    SUBCASE("three-node instance lands between the feasible value and the bound") {
        const Exponent e(2.0);
        const double r = std::sqrt(0.5);
        const TreeInstance inst =
            TreeInstance::build(1, {0.1, 0.1, 0.1}, {1.0, 0.5, 0.5}, {1.0, r, r});
        const MaximizeResult res = maximizeRatio(inst, e, fast, 3);
        CHECK(res.ratio >= 0.3 * (1.0 - 1e-12));
        CHECK(res.ratio <= e.cP * (1.0 + 1e-9));
    }
    SUBCASE("multistart agrees with exhaustive grid search on small trees") {
        for (int depth : {1, 2}) {
            for (double p : {1.5, 2.0, 3.0}) {
                const Exponent e(p);
                Stream st(131, static_cast<std::uint64_t>(depth * 10 + p));
                std::vector<double> lambda(nodeCountForDepth(depth));
                for (double& x : lambda) x = st.logUniform(0.5, 2.0);
                const std::vector<double> alpha = saturatingAlpha(depth, lambda, e);
                const TreeInstance inst = TreeInstance::build(
                    depth, alpha, lambda, std::vector<double>(lambda.size(), 1.0));

                MaximizeOptions opts;
                opts.iters = 4000;
                opts.multistarts = 16;
                const MaximizeResult res = maximizeRatio(inst, e, opts, 17);

                // Self-contained ratio evaluation, independent of the library path.
                const std::size_t n = lambda.size();
                std::vector<double> lamQ(n), invLen(n);
                for (NodeId i = 1; i <= n; ++i) {
                    lamQ[i - 1] = std::pow(inst.lambda(i), 1.0 / e.pConj);
                    invLen[i - 1] = std::ldexp(1.0, TreeInstance::level(i));
                }
                std::vector<double> fbuf(n);
                const auto fn = [&](const std::vector<double>& phi) {
                    double den = 0;
                    for (double x : phi) den += std::pow(x, e.p);
                    if (den == 0.0) return 0.0;
                    for (std::size_t k = n; k >= 1; --k) {
                        double half = 0;
                        if (2 * k <= n) half = 0.5 * (fbuf[2 * k - 1] + fbuf[2 * k]);
                        fbuf[k - 1] = phi[k - 1] * lamQ[k - 1] * invLen[k - 1] + half;
                    }
                    double num = 0;
                    for (std::size_t k = 0; k < n; ++k)
                        num += inst.alpha(static_cast<NodeId>(k + 1)) * std::pow(fbuf[k], e.p);
                    return num / den;
                };
                const int m = depth == 1 ? 96 : 24;
                std::vector<double> arg;
                const double coarse = oracle::simplexGridMax(n, m, fn, &arg);
                const double grid = oracle::simplexPolish(fn, arg, 1.0 / m);
                CHECK(grid >= coarse);
                CHECK(std::abs(res.ratio - grid) <= 1e-3 * std::max(1.0, grid));
            }
        }
    }
    SUBCASE("invariant under lambda rescaling with resaturated weights") {
        const Exponent e(2.5);
        Stream st(141, 0);
        std::vector<double> lambda(nodeCountForDepth(3));
        for (double& x : lambda) x = st.logUniform(0.25, 4.0);
        const auto run = [&](const std::vector<double>& lam) {
            const std::vector<double> alpha = saturatingAlpha(3, lam, e);
            const TreeInstance inst =
                TreeInstance::build(3, alpha, lam, std::vector<double>(lam.size(), 1.0));
            return maximizeRatio(inst, e, MaximizeOptions{3000, 0.1, 8, 1e-12, 100}, 5).ratio;
        };
        const double base = run(lambda);
        std::vector<double> scaled = lambda;
        for (double& x : scaled) x *= 7.25;
        CHECK(oracle::relErr(run(scaled), base) < 1e-6);
    }
    SUBCASE("rejects instances failing the testing condition") {
        const Exponent e(2.0);
        const TreeInstance inst =
            TreeInstance::build(1, {10, 10, 10}, {1.0, 0.5, 0.5}, {1, 1, 1});
        CHECK_THROWS_AS(maximizeRatio(inst, e, fast, 1), std::invalid_argument);
    }
}

TEST_CASE("p sweep") {
    MaximizeOptions fast;
    fast.iters = 1200;
    fast.multistarts = 6;
    const std::vector<double> grid = sampling::pGrid();

    SUBCASE("rows carry C(p) and stay below it") {
        const std::vector<SweepRow> rows = pSweep(3, LambdaFamily::Uniform, grid, 7, fast);
        REQUIRE(rows.size() == grid.size());
        for (const SweepRow& r : rows) {
            if (r.p == 2.0) CHECK(r.cP == doctest::Approx(4.0));
            CHECK(r.fraction <= 1.0 + 1e-9);
            CHECK(r.ratio <= r.cP * (1.0 + 1e-9));
            CHECK(r.family == "uniform");
        }
    }
    SUBCASE("best ratio is non-decreasing in depth for the uniform family") {
        double prev = 0.0;
        for (int depth = 0; depth <= 6; ++depth) {
            const std::vector<SweepRow> rows = pSweep(depth, LambdaFamily::Uniform, {2.0}, 7, fast);
            CHECK(rows[0].ratio >= prev * (1.0 - 1e-6));
            prev = rows[0].ratio;
        }
    }
    SUBCASE("unknown family name") {
        CHECK_THROWS_AS(familyFromName("fancy"), std::invalid_argument);
        CHECK(familyFromName("geometric") == LambdaFamily::Geometric);
    }
    SUBCASE("p grid entries must exceed 1") {
        CHECK_THROWS_AS(pSweep(1, LambdaFamily::Uniform, {0.5}, 1, fast),
                        std::invalid_argument);
    }
}
