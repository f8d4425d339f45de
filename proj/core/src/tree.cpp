#include "hardy/tree.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hardy {

std::size_t nodeCountForDepth(int depth) {
    // NodeId is 32-bit; depth 30 already means 2^31 - 1 nodes.
    if (depth < 0 || depth > 30)
        throw std::invalid_argument("depth must be in [0, 30], got " + std::to_string(depth));
    return (std::size_t(2) << depth) - 1;
}

int TreeInstance::level(NodeId i) noexcept {
    return std::bit_width(static_cast<std::uint32_t>(i)) - 1;
}

namespace {

void checkLength(const char* field, std::size_t got, std::size_t want, int depth) {
    if (got != want)
        throw std::invalid_argument(std::string(field) + " has length " + std::to_string(got) +
                                    ", expected " + std::to_string(want) + " for depth " +
                                    std::to_string(depth));
}

void checkSigns(const char* field, const std::vector<double>& x, bool strictlyPositive) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        const bool bad = !std::isfinite(x[k]) || (strictlyPositive ? !(x[k] > 0.0) : x[k] < 0.0);
        if (bad)
            throw std::invalid_argument(std::string(field) + " must be " +
                                        (strictlyPositive ? "positive" : "nonnegative") +
                                        " and finite at node " + std::to_string(k + 1) +
                                        " (value " + std::to_string(x[k]) + ")");
    }
}

} // namespace

TreeInstance TreeInstance::build(int depth, std::vector<double> alpha,
                                 std::vector<double> lambda, std::vector<double> phi) {
    const std::size_t n = nodeCountForDepth(depth);
    checkLength("alpha", alpha.size(), n, depth);
    checkLength("lambda", lambda.size(), n, depth);
    checkLength("phi", phi.size(), n, depth);
    checkSigns("alpha", alpha, true);
    checkSigns("lambda", lambda, true);
    checkSigns("phi", phi, false);

    TreeInstance t;
    t.depth_ = depth;
    t.alpha_ = std::move(alpha);
    t.lambda_ = std::move(lambda);
    t.phi_ = std::move(phi);
    return t;
}

TreeInstance TreeInstance::withPhi(std::vector<double> phi) const {
    return build(depth_, alpha_, lambda_, std::move(phi));
}

TreeInstance TreeInstance::withAlpha(std::vector<double> alpha) const {
    return build(depth_, std::move(alpha), lambda_, phi_);
}

double intervalLength(NodeId node, int depth) {
    const std::size_t n = nodeCountForDepth(depth);
    if (node < 1 || node > n)
        throw std::out_of_range("node index " + std::to_string(node) + " outside [1, " +
                                std::to_string(n) + "]");
    return std::ldexp(1.0, -TreeInstance::level(node));
}

NodeAggregates computeAggregates(const TreeInstance& inst, const Exponent& exp) {
    const std::size_t n = inst.nodeCount();
    NodeAggregates agg;
    agg.bigLambda.resize(n);
    agg.v.resize(n);
    agg.F.resize(n);
    agg.f.resize(n);
    agg.A.resize(n);
    agg.a.resize(n);
    agg.b.resize(n);
    agg.c.resize(n);

    const double p = exp.p;
    const double pc = exp.pConj;

    // Bottom-up; children of i live at 2i, 2i+1 and are already done.
    for (std::size_t k = n; k >= 1; --k) {
        const NodeId i = static_cast<NodeId>(k);
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        const double invLen = 1.0 / len;
        const double lam = inst.lambda(i);
        const double ph = inst.phi(i);

        const double a = std::pow(lam * invLen, 1.0 / pc);
        const double b = ph * std::pow(invLen, 1.0 / p);

        double vHalf = 0, FHalf = 0, fHalf = 0, AHalf = 0, lamSub = 0;
        if (!inst.isLeaf(i)) {
            const std::size_t l = 2 * k - 1, r = 2 * k;
            vHalf = 0.5 * (agg.v[l] + agg.v[r]);
            FHalf = 0.5 * (agg.F[l] + agg.F[r]);
            fHalf = 0.5 * (agg.f[l] + agg.f[r]);
            AHalf = 0.5 * (agg.A[l] + agg.A[r]);
            lamSub = agg.bigLambda[l] + agg.bigLambda[r];
        }

        const double v = std::pow(a, pc) + vHalf;
        const double c = inst.alpha(i) * std::pow(v, p) * invLen;

        agg.bigLambda[k - 1] = lam + lamSub;
        agg.v[k - 1] = v;
        agg.F[k - 1] = std::pow(b, p) + FHalf;
        agg.f[k - 1] = a * b + fHalf;
        agg.A[k - 1] = c + AHalf;
        agg.a[k - 1] = a;
        agg.b[k - 1] = b;
        agg.c[k - 1] = c;
    }
    return agg;
}

std::vector<double> testingMargins(const NodeAggregates& agg) {
    std::vector<double> m(agg.v.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = agg.v[k] - agg.A[k];
    return m;
}

std::vector<double> testingMargins(const TreeInstance& inst, const Exponent& exp) {
    return testingMargins(computeAggregates(inst, exp));
}

} // namespace hardy
