#include "hardy/hardy_check.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace hardy {

namespace {

// Preorder (node, left, right) reduction; fixed order keeps sums reproducible.
double preorderSum(const TreeInstance& inst, const std::function<double(NodeId)>& term,
                   NodeId at = TreeInstance::root()) {
    double s = term(at);
    if (!inst.isLeaf(at)) {
        s += preorderSum(inst, term, TreeInstance::left(at));
        s += preorderSum(inst, term, TreeInstance::right(at));
    }
    return s;
}

} // namespace

DualData makeDualData(const TreeInstance& inst, const Exponent& exp,
                      std::vector<double> psi) {
    const std::size_t n = inst.nodeCount();
    if (psi.size() != n)
        throw std::invalid_argument("psi has length " + std::to_string(psi.size()) +
                                    ", expected " + std::to_string(n));
    DualData d;
    d.eta.resize(n);
    d.omega.resize(n);
    for (NodeId i = 1; i <= n; ++i) {
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        d.eta[i - 1] = inst.phi(i) * std::pow(inst.lambda(i), -1.0 / exp.p);
        // omega^{1-p} = alpha/|I|^p
        d.omega[i - 1] = std::pow(inst.alpha(i) / std::pow(len, exp.p), 1.0 / (1.0 - exp.p));
    }
    d.psi = std::move(psi);
    return d;
}

double hardyLhs(const NodeAggregates& agg, const TreeInstance& inst, const Exponent& exp) {
    return preorderSum(inst, [&](NodeId i) {
        return inst.alpha(i) * std::pow(agg.f[i - 1], exp.p);
    });
}

double hardyRhs(const NodeAggregates& agg, const Exponent& exp) {
    return exp.cP * agg.F[0];
}

double hardyRatio(const TreeInstance& inst, const Exponent& exp) {
    const NodeAggregates agg = computeAggregates(inst, exp);
    const double den = preorderSum(inst, [&](NodeId i) {
        return std::pow(inst.phi(i), exp.p);
    });
    if (!(den > 0.0))
        throw std::domain_error("hardyRatio: phi is identically zero");
    return hardyLhs(agg, inst, exp) / den;
}

std::pair<double, double> necessityIdentity(const TreeInstance& inst,
                                            const Exponent& exp, NodeId node) {
    const std::size_t n = inst.nodeCount();
    if (node < 1 || node > n)
        throw std::out_of_range("node index " + std::to_string(node) + " outside [1, " +
                                std::to_string(n) + "]");

    // f-hat over the subtree with phi := lambda^{1/p}, original lengths.
    std::vector<double> fhat(n, 0.0);
    const std::function<void(NodeId)> fill = [&](NodeId i) {
        double half = 0;
        if (!inst.isLeaf(i)) {
            fill(TreeInstance::left(i));
            fill(TreeInstance::right(i));
            half = 0.5 * (fhat[2 * i - 1] + fhat[2 * i]);
        }
        const double invLen = std::ldexp(1.0, TreeInstance::level(i));
        const double phiI = std::pow(inst.lambda(i), 1.0 / exp.p);
        fhat[i - 1] = phiI * std::pow(inst.lambda(i), 1.0 / exp.pConj) * invLen + half;
    };
    fill(node);

    double lhs = 0, massSum = 0;
    const std::function<void(NodeId)> reduce = [&](NodeId i) {
        lhs += inst.alpha(i) * std::pow(fhat[i - 1], exp.p);
        massSum += inst.lambda(i);
        if (!inst.isLeaf(i)) {
            reduce(TreeInstance::left(i));
            reduce(TreeInstance::right(i));
        }
    };
    reduce(node);

    const double invLen = std::ldexp(1.0, TreeInstance::level(node));
    return {lhs * invLen, massSum * invLen};
}

std::vector<double> ancestorSum(const std::vector<double>& psi, const TreeInstance& inst) {
    const std::size_t n = inst.nodeCount();
    if (psi.size() != n)
        throw std::invalid_argument("psi has length " + std::to_string(psi.size()) +
                                    ", expected " + std::to_string(n));
    std::vector<double> out(n);
    out[0] = psi[0];
    for (std::size_t k = 2; k <= n; ++k) out[k - 1] = out[k / 2 - 1] + psi[k - 1];
    return out;
}

double adjointnessGap(const std::vector<double>& eta, const std::vector<double>& psi,
                      const TreeInstance& inst) {
    const std::vector<double> s = ancestorSum(psi, inst);

    // Subtree sums of eta * lambda, bottom-up.
    const std::size_t n = inst.nodeCount();
    std::vector<double> sub(n);
    for (std::size_t k = n; k >= 1; --k) {
        const NodeId i = static_cast<NodeId>(k);
        double kids = 0;
        if (!inst.isLeaf(i)) kids = sub[2 * k - 1] + sub[2 * k];
        sub[k - 1] = eta[k - 1] * inst.lambda(i) + kids;
    }

    const double pairedDown = preorderSum(inst, [&](NodeId i) {
        return s[i - 1] * eta[i - 1] * inst.lambda(i);
    });
    const double pairedUp = preorderSum(inst, [&](NodeId i) {
        return psi[i - 1] * sub[i - 1];
    });
    return pairedDown - pairedUp;
}

double dualRatio(const TreeInstance& inst, const std::vector<double>& psi,
                 const Exponent& exp) {
    const DualData d = makeDualData(inst, exp, psi);
    const std::vector<double> s = ancestorSum(psi, inst);
    const double num = preorderSum(inst, [&](NodeId i) {
        return inst.lambda(i) * std::pow(s[i - 1], exp.pConj);
    });
    const double den = preorderSum(inst, [&](NodeId i) {
        return std::pow(psi[i - 1], exp.pConj) * d.omega[i - 1];
    });
    if (!(den > 0.0))
        throw std::domain_error("dualRatio: psi is identically zero");
    return num / den;
}

std::vector<double> dualCertificate(const TreeInstance& inst, const Exponent& exp,
                                    const std::vector<double>& phi) {
    const TreeInstance with = inst.withPhi(phi);
    const NodeAggregates agg = computeAggregates(with, exp);
    const std::size_t n = inst.nodeCount();
    std::vector<double> psi(n);
    for (NodeId i = 1; i <= n; ++i) {
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        psi[i - 1] = inst.alpha(i) / std::pow(len, exp.p) *
                     std::pow(len * agg.f[i - 1], exp.p - 1.0);
    }
    return psi;
}

} // namespace hardy
