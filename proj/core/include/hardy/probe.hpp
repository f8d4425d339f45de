#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardy/exponent.hpp"
#include "hardy/tree.hpp"

namespace hardy {

/// Bottom-up weights making the testing condition an equality at every node:
/// alpha_I = |I| (v_I - (A_{I-}+A_{I+})/2) / v_I^p (leaves: |I| v_I^{1-p}).
/// Since v_I always exceeds the children average, the expression is positive;
/// a nonpositive value (never hit for lambda > 0) gets a tiny floor and the
/// node is reported through `unsaturatable`.
std::vector<double> saturatingAlpha(int depth, const std::vector<double>& lambda,
                                    const Exponent& exp,
                                    std::vector<NodeId>* unsaturatable = nullptr);

struct MaximizeOptions {
    int iters = 5000;          // per start
    double step = 0.1;         // fixed step along the normalized gradient
    int multistarts = 16;      // random starts beside the lambda^{1/p} start
    double improveTol = 1e-10; // relative improvement threshold
    int patience = 50;         // iterations without improvement before stopping
};

struct MaximizeResult {
    std::vector<double> arg;  // maximizing test function, ||.||_p = 1
    double ratio = 0;
    long itersUsed = 0;
};

/// Projected gradient ascent on the degree-0 homogeneous ratio
/// sum alpha_I f_I(phi)^p / sum phi^p over phi >= 0. Deterministic given the
/// seed; the reported ratio is the best iterate (monotone non-decreasing).
/// Requires the instance to pass the testing condition.
MaximizeResult maximizeRatio(const TreeInstance& inst, const Exponent& exp,
                             const MaximizeOptions& opts, std::uint64_t seed);

/// Same ascent on the dual ratio over psi >= 0. `warmStart`, when given, is
/// used as an extra start (e.g. the dual certificate of a primal maximizer).
MaximizeResult maximizeDualRatio(const TreeInstance& inst, const Exponent& exp,
                                 const MaximizeOptions& opts, std::uint64_t seed,
                                 const std::vector<double>* warmStart = nullptr);

enum class LambdaFamily { Uniform, Geometric, Random };

std::string familyName(LambdaFamily family);
LambdaFamily familyFromName(const std::string& name);

/// uniform: lambda_I = |I|; geometric: lambda_I = |I|^s; random: i.i.d.
/// log-uniform over [1/4, 4] keyed by (seed, node).
std::vector<double> makeLambdaFamily(LambdaFamily family, int depth,
                                     double geomExponent, std::uint64_t seed);

struct SweepRow {
    double p = 0;
    int depth = 0;
    std::string family;
    double ratio = 0;
    double cP = 0;
    double fraction = 0;  // ratio / C(p)
};

/// For each p: family lambda, saturating alpha, ratio maximization.
std::vector<SweepRow> pSweep(int depth, LambdaFamily family,
                             const std::vector<double>& pGrid, std::uint64_t seed,
                             const MaximizeOptions& opts = {},
                             double geomExponent = 1.5);

} // namespace hardy
