#include "hardy/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hardy {

std::string DomainCheck::describe() const {
    if (ok()) return "in domain";
    std::string s = "domain violation:";
    if (violated & kViolatesFSign) s += " F<0";
    if (violated & kViolatesfSign) s += " f<0";
    if (violated & kViolatesAPositive) s += " A<=0";
    if (violated & kViolatesVPositive) s += " v<=0";
    if (violated & kViolatesVGeA) s += " v<A";
    if (violated & kViolatesHolder) s += " f^p>F*v^(p-1)";
    return s;
}

DomainCheck inDomain(const BellmanPoint& x, const Exponent& exp, double tol) {
    DomainCheck d;
    if (!std::isfinite(x.F) || x.F < -tol) d.violated |= kViolatesFSign;
    if (!std::isfinite(x.f) || x.f < -tol) d.violated |= kViolatesfSign;
    if (!std::isfinite(x.A) || !(x.A >= kPositiveFloor)) d.violated |= kViolatesAPositive;
    if (!std::isfinite(x.v) || !(x.v >= kPositiveFloor)) d.violated |= kViolatesVPositive;
    if (x.v - x.A < -tol * std::max(1.0, x.A)) d.violated |= kViolatesVGeA;
    const double fc = std::max(x.f, 0.0), Fc = std::max(x.F, 0.0);
    const double lhs = std::pow(fc, exp.p);
    const double rhs = Fc * std::pow(std::max(x.v, 0.0), exp.p - 1.0);
    if (!(lhs <= rhs * (1.0 + tol))) d.violated |= kViolatesHolder;
    return d;
}

DomainCheck inClosure(const BellmanPoint& x, const Exponent& exp, double tol) {
    DomainCheck d;
    if (!std::isfinite(x.F) || x.F < 0) d.violated |= kViolatesFSign;
    if (!std::isfinite(x.f) || x.f < 0) d.violated |= kViolatesfSign;
    if (!std::isfinite(x.A) || x.A < 0) d.violated |= kViolatesAPositive;
    if (!std::isfinite(x.v) || x.v < 0) d.violated |= kViolatesVPositive;
    if (x.v < x.A) d.violated |= kViolatesVGeA;
    if (d.violated) return d;
    const double lhs = std::pow(x.f, exp.p);
    const double rhs = x.F * std::pow(x.v, exp.p - 1.0);
    if (!(lhs <= rhs * (1.0 + tol))) d.violated |= kViolatesHolder;
    return d;
}

double bellmanValueUnchecked(const BellmanPoint& x, const Exponent& exp) noexcept {
    const double p = exp.p;
    const double S = x.A + (p - 1.0) * x.v;
    const double fc = std::max(x.f, 0.0);
    return exp.cP * x.F - std::pow(p, p) / (p - 1.0) * std::pow(fc, p) / std::pow(S, p - 1.0);
}

double bellmanValue(const BellmanPoint& x, const Exponent& exp) {
    const DomainCheck d = inDomain(x, exp);
    if (!d.ok()) throw std::domain_error("bellmanValue: " + d.describe());
    return bellmanValueUnchecked(x, exp);
}

BellmanDerivatives bellmanDerivatives(const BellmanPoint& x, const Exponent& exp) {
    const DomainCheck d = inDomain(x, exp);
    if (!d.ok()) throw std::domain_error("bellmanDerivatives: " + d.describe());
    const double p = exp.p;
    const double fc = std::max(x.f, 0.0);
    if (fc == 0.0 && p < 2.0)
        throw std::domain_error("bellmanDerivatives: Hessian singular at f = 0 for p < 2");

    const double S = x.A + (p - 1.0) * x.v;
    const double pp = std::pow(p, p);
    const double pp1 = pp * p;  // p^{p+1}
    const double Sp1 = std::pow(S, p - 1.0);
    const double Sp = Sp1 * S;
    const double Spp1 = Sp * S;
    const double fpm2 = std::pow(fc, p - 2.0);  // p=2, f=0 gives 1 (pow(0,0))
    const double fpm1 = fpm2 * fc;
    const double fp = fpm1 * fc;

    BellmanDerivatives out{};
    out.grad[0] = exp.cP;
    out.grad[1] = -pp1 / (p - 1.0) * fpm1 / Sp1;
    out.grad[2] = pp * fp / Sp;
    out.grad[3] = (p - 1.0) * out.grad[2];

    const double Hff = -pp1 * fpm2 / Sp1;
    const double HfA = pp1 * fpm1 / Sp;
    const double HAA = -pp1 * fp / Spp1;
    auto& H = out.hess;
    H[1][1] = Hff;
    H[1][2] = H[2][1] = HfA;
    H[1][3] = H[3][1] = (p - 1.0) * HfA;
    H[2][2] = HAA;
    H[2][3] = H[3][2] = (p - 1.0) * HAA;
    H[3][3] = (p - 1.0) * (p - 1.0) * HAA;
    return out;
}

std::array<double, 4> hessianSpectrum(const BellmanPoint& x, const Exponent& exp) {
    const DomainCheck d = inDomain(x, exp);
    if (!d.ok()) throw std::domain_error("hessianSpectrum: " + d.describe());
    const double p = exp.p;
    const double fc = std::max(x.f, 0.0);
    if (fc == 0.0 && p < 2.0)
        throw std::domain_error("hessianSpectrum: boundary-singular point (f = 0, p < 2)");

    // Rank-one Hessian: the extreme eigenvalue is the trace.
    const double S = x.A + (p - 1.0) * x.v;
    const double pp1 = std::pow(p, p + 1.0);
    const double fpm2 = std::pow(fc, p - 2.0);
    const double fp = fpm2 * fc * fc;
    const double extreme = -pp1 * (fpm2 / std::pow(S, p - 1.0) +
                                   (1.0 + (p - 1.0) * (p - 1.0)) * fp / std::pow(S, p + 1.0));
    return {extreme, 0.0, 0.0, 0.0};
}

std::array<double, 2> domainSupportConcavity(double F, double v, const Exponent& exp) {
    if (!(F > 0.0) || !(v > 0.0))
        throw std::domain_error("domainSupportConcavity: requires F > 0 and v > 0");
    const double p = exp.p, q = exp.pConj;
    const double lambda2 = (1.0 - p) / (p * p) * std::pow(F, 1.0 / p - 2.0) * std::pow(v, 1.0 / q) +
                           (1.0 - q) / (q * q) * std::pow(F, 1.0 / p) * std::pow(v, 1.0 / q - 2.0);
    return {0.0, lambda2};
}

double midpointScalarGap(double y, double a, double b, const Exponent& exp) {
    if (y < 0 || a < 0 || b < 0)
        throw std::invalid_argument("midpointScalarGap: requires y, a, b >= 0");
    const double p = exp.p;
    const double pp = std::pow(p, p);
    return exp.cP * std::pow(b, p) -
           pp * p / (p - 1.0) * std::pow(y, p - 1.0) * a * b +
           (p - 1.0) * pp * std::pow(y, p) * std::pow(a, exp.pConj);
}

double midpointScalarMinimizer(double a, double b, const Exponent& exp) {
    if (!(a > 0.0)) throw std::invalid_argument("midpointScalarMinimizer: requires a > 0");
    return b / ((exp.p - 1.0) * std::pow(a, exp.pConj - 1.0));
}

BellmanPoint composeMidpoint(const BellmanPoint& xm, const BellmanPoint& xp,
                             double a, double b, double c, const Exponent& exp) {
    return {0.5 * (xm.F + xp.F) + std::pow(b, exp.p),
            0.5 * (xm.f + xp.f) + a * b,
            0.5 * (xm.A + xp.A) + c,
            0.5 * (xm.v + xp.v) + std::pow(a, exp.pConj)};
}

double midpointMargin(const BellmanPoint& xm, const BellmanPoint& xp,
                      double a, double b, double c, const Exponent& exp,
                      MarginKind kind) {
    if (a < 0 || b < 0 || c < 0)
        throw std::invalid_argument("midpointMargin: requires a, b, c >= 0");
    const double Bm = bellmanValue(xm, exp);
    const double Bp = bellmanValue(xp, exp);
    const BellmanPoint x = composeMidpoint(xm, xp, a, b, c, exp);
    const DomainCheck d = inDomain(x, exp);
    if (!d.ok()) throw std::domain_error("midpointMargin: composed point " + d.describe());

    const double p = exp.p;
    const double fp = std::pow(std::max(x.f, 0.0), p);
    const double R = (kind == MarginKind::Strong)
                         ? std::pow(p, p) * fp / std::pow(x.A + (p - 1.0) * x.v, p) * c
                         : fp / std::pow(x.v, p) * c;
    return bellmanValueUnchecked(x, exp) - 0.5 * (Bm + Bp) - R;
}

std::pair<double, double> boundsMargin(const BellmanPoint& x, const Exponent& exp) {
    const double B = bellmanValue(x, exp);
    return {B, exp.cP * x.F - B};
}

bool TelescopeReport::holds(double tol) const {
    const double slack = tol * std::max(1.0, rootUpperBound);
    return minMargin >= -slack && weightedPayoff <= rootValue + slack &&
           rootValue <= rootUpperBound + slack;
}

TelescopeReport telescopingReplay(const TreeInstance& inst, const Exponent& exp) {
    const NodeAggregates agg = computeAggregates(inst, exp);
    const std::size_t n = inst.nodeCount();

    std::vector<double> value(n);  // B at each node's aggregate point
    for (std::size_t k = 1; k <= n; ++k) {
        const BellmanPoint x{agg.F[k - 1], agg.f[k - 1], agg.A[k - 1], agg.v[k - 1]};
        const DomainCheck d = inDomain(x, exp);
        if (!d.ok())
            throw std::domain_error("telescopingReplay: node " + std::to_string(k) + " " +
                                    d.describe() + " (testing condition fails there)");
        value[k - 1] = bellmanValueUnchecked(x, exp);
    }

    TelescopeReport rep;
    rep.margins.resize(n);
    double minMargin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n; ++k) {
        const NodeId i = static_cast<NodeId>(k);
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        const double term = inst.alpha(i) * std::pow(agg.f[k - 1], exp.p);
        double kids = 0;
        if (!inst.isLeaf(i)) kids = 0.5 * len * (value[2 * k - 1] + value[2 * k]);
        rep.margins[k - 1] = len * value[k - 1] - kids - term;
        minMargin = std::min(minMargin, rep.margins[k - 1]);
    }
    // Same preorder reduction as hardyLhs, so the two agree bit for bit.
    const std::function<double(NodeId)> payoffSum = [&](NodeId i) {
        double s = inst.alpha(i) * std::pow(agg.f[i - 1], exp.p);
        if (!inst.isLeaf(i)) {
            s += payoffSum(TreeInstance::left(i));
            s += payoffSum(TreeInstance::right(i));
        }
        return s;
    };
    rep.weightedPayoff = payoffSum(TreeInstance::root());
    rep.rootValue = value[0];
    rep.rootUpperBound = exp.cP * agg.F[0];
    rep.minMargin = minMargin;
    return rep;
}

} // namespace hardy
