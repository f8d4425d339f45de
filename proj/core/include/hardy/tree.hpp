#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hardy/exponent.hpp"

namespace hardy {

/// 1-based heap index into a complete dyadic tree: root = 1, children of
/// node i are 2i and 2i+1.
using NodeId = std::uint32_t;

/// Nodes of a complete tree of the given depth (root at level 0).
std::size_t nodeCountForDepth(int depth);

/// A finite dyadic tree with per-node weights alpha > 0, measure masses
/// lambda > 0, and test function phi >= 0, stored in heap order. A node at
/// level l carries the interval length 2^-l; the root interval has length 1.
class TreeInstance {
public:
    /// Validates lengths and signs; errors name the offending field/node.
    static TreeInstance build(int depth, std::vector<double> alpha,
                              std::vector<double> lambda, std::vector<double> phi);

    int depth() const noexcept { return depth_; }
    std::size_t nodeCount() const noexcept { return lambda_.size(); }
    static constexpr NodeId root() noexcept { return 1; }

    double alpha(NodeId i) const noexcept { return alpha_[i - 1]; }
    double lambda(NodeId i) const noexcept { return lambda_[i - 1]; }
    double phi(NodeId i) const noexcept { return phi_[i - 1]; }

    const std::vector<double>& alphas() const noexcept { return alpha_; }
    const std::vector<double>& lambdas() const noexcept { return lambda_; }
    const std::vector<double>& phis() const noexcept { return phi_; }

    bool isLeaf(NodeId i) const noexcept { return 2 * std::size_t(i) > nodeCount(); }
    static NodeId left(NodeId i) noexcept { return 2 * i; }
    static NodeId right(NodeId i) noexcept { return 2 * i + 1; }
    static NodeId parent(NodeId i) noexcept { return i / 2; }
    static int level(NodeId i) noexcept;

    /// Copy with a replaced test function (validated).
    TreeInstance withPhi(std::vector<double> phi) const;
    /// Copy with replaced weights (validated).
    TreeInstance withAlpha(std::vector<double> alpha) const;

private:
    TreeInstance() = default;
    int depth_ = 0;
    std::vector<double> alpha_, lambda_, phi_;
};

/// |I| = 2^-level(node); validates the index against the depth.
double intervalLength(NodeId node, int depth);

/// Per-node aggregates, filled by one bottom-up pass:
///   bigLambda = sum of lambda over the subtree,
///   v = bigLambda / |I|,
///   F = (1/|I|) sum phi^p,
///   f = (1/|I|) sum phi lambda^{1/p'},
///   A = (1/|I|) sum_K alpha_K v_K^p,
/// together with the node increments a = (lambda/|I|)^{1/p'},
/// b = phi/|I|^{1/p}, c = alpha v^p/|I| entering the recursions
///   v = a^{p'} + (v_- + v_+)/2,   F = b^p + (F_- + F_+)/2,
///   f = a b + (f_- + f_+)/2,      A = c + (A_- + A_+)/2.
/// Vectors are heap-ordered with node i stored at [i-1].
struct NodeAggregates {
    std::vector<double> bigLambda, v, F, f, A, a, b, c;
};

NodeAggregates computeAggregates(const TreeInstance& inst, const Exponent& exp);

/// v_I - A_I per node; the testing condition holds iff every entry >= 0.
std::vector<double> testingMargins(const NodeAggregates& agg);
std::vector<double> testingMargins(const TreeInstance& inst, const Exponent& exp);

} // namespace hardy
