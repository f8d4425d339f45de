#include "hardy/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hardy/rng.hpp"
#include "parallel.hpp"

namespace hardy {

namespace {
constexpr double kDiffuseLoading = 0.25;

void requireU5(const ControlVector& u) {
    if (!(u.u5 >= 0.0))
        throw std::invalid_argument("control requires u5 >= 0, got " + std::to_string(u.u5));
}
} // namespace

ControlPolicy ControlPolicy::driftOnly() {
    ControlPolicy p;
    p.name_ = "drift-only";
    p.startTimes_ = {0.0};
    p.pieces_ = {ControlVector{0, 0, 0, 0, 1}};
    return p;
}

ControlPolicy ControlPolicy::zero() {
    ControlPolicy p;
    p.name_ = "zero";
    p.startTimes_ = {0.0};
    p.pieces_ = {ControlVector{}};
    return p;
}

ControlPolicy ControlPolicy::diffuseThenDrift(double switchTime) {
    if (!(switchTime >= 0.0))
        throw std::invalid_argument("diffuse-then-drift requires a nonnegative switch time");
    ControlPolicy p;
    p.name_ = "diffuse-then-drift(" + std::to_string(switchTime) + ")";
    p.startTimes_ = {0.0, switchTime};
    p.pieces_ = {ControlVector{kDiffuseLoading, kDiffuseLoading, kDiffuseLoading,
                               kDiffuseLoading, 0},
                 ControlVector{0, 0, 0, 0, 1}};
    return p;
}

ControlPolicy ControlPolicy::piecewise(std::vector<double> startTimes,
                                       std::vector<ControlVector> pieces) {
    if (startTimes.empty() || startTimes.size() != pieces.size())
        throw std::invalid_argument("piecewise policy needs matching, nonempty schedules");
    if (startTimes.front() != 0.0)
        throw std::invalid_argument("piecewise policy must start at time 0");
    if (!std::is_sorted(startTimes.begin(), startTimes.end()))
        throw std::invalid_argument("piecewise start times must be sorted");
    for (const ControlVector& u : pieces) requireU5(u);
    ControlPolicy p;
    p.name_ = "piecewise[" + std::to_string(pieces.size()) + "]";
    p.startTimes_ = std::move(startTimes);
    p.pieces_ = std::move(pieces);
    return p;
}

ControlVector ControlPolicy::at(double t, const BellmanPoint&) const {
    std::size_t k = pieces_.size() - 1;
    while (k > 0 && t < startTimes_[k]) --k;
    return pieces_[k];
}

double payoffDensity(const BellmanPoint& x, double u5, const Exponent& exp) {
    if (!(u5 >= 0.0)) throw std::invalid_argument("payoffDensity: u5 must be >= 0");
    const double den = x.A + (exp.p - 1.0) * x.v;
    if (!(den > 0.0))
        throw std::domain_error("payoffDensity: nonpositive denominator x3+(p-1)x4");
    return std::pow(exp.p, exp.p) * std::pow(x.f / den, exp.p) * u5;
}

double bequestExt(const BellmanPoint& x, const Exponent& exp) {
    const DomainCheck d = inClosure(x, exp);
    if (!d.ok()) throw std::domain_error("bequestExt: point outside closure; " + d.describe());
    const double S = x.A + (exp.p - 1.0) * x.v;
    if (!(S > 0.0)) return 0.0;  // the (F,0,0,0) corner
    return exp.cP * x.F -
           std::pow(exp.p, exp.p) / (exp.p - 1.0) * std::pow(x.f, exp.p) / std::pow(S, exp.p - 1.0);
}

PathSample simulatePath(const BellmanPoint& x0, const ControlPolicy& policy,
                        const Exponent& exp, double h, double horizon,
                        std::uint64_t seed, std::uint64_t pathIndex, bool recordStates) {
    if (!(h > 0.0)) throw std::invalid_argument("simulatePath: h must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("simulatePath: horizon must be positive");
    {
        const DomainCheck d = inDomain(x0, exp);
        if (!d.ok()) throw std::domain_error("simulatePath: start " + d.describe());
    }

    PathSample out;
    out.h = h;
    const double sqrtH = std::sqrt(h);
    BellmanPoint x = x0;
    double payoff = 0;
    std::uint64_t k = 0;
    if (recordStates) out.states.push_back(x);

    while (true) {
        const double t = static_cast<double>(k) * h;
        if (t + h > horizon * (1.0 + 1e-12)) {
            out.truncated = true;
            out.exitTime = t;
            out.bequestValue = 0.0;
            break;
        }
        const ControlVector u = policy.at(t, x);
        const double dW = sqrtH * counterGaussian(seed, pathIndex, k, 0);
        const BellmanPoint next{x.F + u.u1 * dW, x.f + u.u2 * dW,
                                x.A - u.u5 * h + u.u3 * dW, x.v + u.u4 * dW};
        if (!inClosure(next, exp).ok()) {
            out.exitTime = t;
            out.bequestValue = bequestExt(x, exp);
            break;
        }
        const double S = x.A + (exp.p - 1.0) * x.v;
        if (u.u5 > 0.0 && S > 0.0) payoff += payoffDensity(x, u.u5, exp) * h;
        x = next;
        ++k;
        if (recordStates) out.states.push_back(x);
    }

    out.exitState = x;
    out.payoffIntegral = payoff;
    out.totalJ = out.payoffIntegral + out.bequestValue;
    out.steps = k;
    return out;
}

namespace {

ValueEstimate summarize(std::vector<double>& J, std::size_t truncated) {
    ValueEstimate est;
    est.paths = J.size();
    est.truncatedPaths = truncated;
    const double n = static_cast<double>(J.size());
    est.mean = detail::pairwiseSum(J) / n;
    std::vector<double> sq(J.size());
    for (std::size_t i = 0; i < J.size(); ++i) {
        const double d = J[i] - est.mean;
        sq[i] = d * d;
    }
    const double var = J.size() > 1 ? detail::pairwiseSum(sq) / (n - 1.0) : 0.0;
    est.standardError = std::sqrt(var / n);
    return est;
}

ValueEstimate estimateCommon(const BellmanPoint& x0, const ControlPolicy& policy,
                             const Exponent& exp, double h, double horizon,
                             std::size_t nPaths, std::uint64_t seed, bool addTruncatedBequest) {
    if (nPaths < 2) throw std::invalid_argument("estimateValue: needs at least 2 paths");
    std::vector<double> J(nPaths);
    std::vector<unsigned char> trunc(nPaths, 0);
    detail::parallelChunks(nPaths, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const PathSample s = simulatePath(x0, policy, exp, h, horizon, seed, i);
            double v = s.totalJ;
            if (s.truncated) {
                trunc[i] = 1;
                if (addTruncatedBequest) v += bequestExt(s.exitState, exp);
            }
            J[i] = v;
        }
    });
    std::size_t truncated = 0;
    for (unsigned char t : trunc) truncated += t;
    return summarize(J, truncated);
}

} // namespace

ValueEstimate estimateValue(const BellmanPoint& x0, const ControlPolicy& policy,
                            const Exponent& exp, double h, double horizon,
                            std::size_t nPaths, std::uint64_t seed) {
    return estimateCommon(x0, policy, exp, h, horizon, nPaths, seed, true);
}

ValueEstimate estimateValueRaw(const BellmanPoint& x0, const ControlPolicy& policy,
                               const Exponent& exp, double h, double horizon,
                               std::size_t nPaths, std::uint64_t seed) {
    return estimateCommon(x0, policy, exp, h, horizon, nPaths, seed, false);
}

double optimalValueClosedForm(const BellmanPoint& x0, const Exponent& exp) {
    const DomainCheck d = inDomain(x0, exp);
    if (!d.ok()) throw std::domain_error("optimalValueClosedForm: " + d.describe());
    const double p = exp.p;
    const double fc = std::max(x0.f, 0.0);
    const double S0 = (p - 1.0) * x0.v;
    const double S1 = x0.A + S0;
    // int_0^A p^p (f/(A-s+(p-1)v))^p ds, antiderivative evaluated at both ends
    const double payoff = std::pow(p, p) / (p - 1.0) * std::pow(fc, p) *
                          (std::pow(S0, 1.0 - p) - std::pow(S1, 1.0 - p));
    const double bequest = bequestExt({std::max(x0.F, 0.0), fc, 0.0, x0.v}, exp);
    return payoff + bequest;
}

double generatorApplied(const BellmanPoint& x, const ControlVector& u, const Exponent& exp) {
    const BellmanDerivatives d = bellmanDerivatives(x, exp);
    const double load[4] = {u.u1, u.u2, u.u3, u.u4};
    double quad = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) quad += d.hess[i][j] * load[i] * load[j];
    return -u.u5 * d.grad[2] + 0.5 * quad;
}

HjbScan hjbResidual(const BellmanPoint& x, const Exponent& exp,
                    std::span<const ControlVector> grid) {
    if (grid.empty()) throw std::invalid_argument("hjbResidual: empty control grid");
    const BellmanDerivatives d = bellmanDerivatives(x, exp);
    const double den = x.A + (exp.p - 1.0) * x.v;
    const double density = std::pow(exp.p, exp.p) * std::pow(std::max(x.f, 0.0) / den, exp.p);

    HjbScan scan;
    scan.maxResidual = -std::numeric_limits<double>::infinity();
    for (const ControlVector& u : grid) {
        requireU5(u);
        const double load[4] = {u.u1, u.u2, u.u3, u.u4};
        double quad = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) quad += d.hess[i][j] * load[i] * load[j];
        const double r = -d.grad[2] * u.u5 + 0.5 * quad + density * u.u5;
        if (r > scan.maxResidual) {
            scan.maxResidual = r;
            scan.argmax = u;
        }
    }
    return scan;
}

ValueEstimate dynkinGap(const BellmanPoint& x0, const ControlPolicy& policy,
                        const Exponent& exp, double h, double horizon,
                        std::size_t nPaths, std::uint64_t seed) {
    if (nPaths < 2) throw std::invalid_argument("dynkinGap: needs at least 2 paths");
    const double B0 = bellmanValue(x0, exp);
    std::vector<double> gaps(nPaths);
    detail::parallelChunks(nPaths, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            // Replay the path, accumulating the generator by left endpoints.
            const double sqrtH = std::sqrt(h);
            BellmanPoint x = x0;
            double gen = 0;
            std::uint64_t k = 0;
            while (true) {
                const double t = static_cast<double>(k) * h;
                if (t + h > horizon * (1.0 + 1e-12)) break;
                const ControlVector u = policy.at(t, x);
                const double dW = sqrtH * counterGaussian(seed, i, k, 0);
                const BellmanPoint next{x.F + u.u1 * dW, x.f + u.u2 * dW,
                                        x.A - u.u5 * h + u.u3 * dW, x.v + u.u4 * dW};
                if (!inClosure(next, exp).ok()) break;
                gen += generatorApplied(x, u, exp) * h;
                x = next;
                ++k;
            }
            gaps[i] = bequestExt(x, exp) - B0 - gen;
        }
    });
    return summarize(gaps, 0);
}

} // namespace hardy
