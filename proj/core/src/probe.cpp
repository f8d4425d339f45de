#include "hardy/probe.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "hardy/rng.hpp"

namespace hardy {

std::vector<double> saturatingAlpha(int depth, const std::vector<double>& lambda,
                                    const Exponent& exp,
                                    std::vector<NodeId>* unsaturatable) {
    const std::size_t n = nodeCountForDepth(depth);
    if (lambda.size() != n)
        throw std::invalid_argument("lambda has length " + std::to_string(lambda.size()) +
                                    ", expected " + std::to_string(n));
    for (std::size_t k = 0; k < n; ++k)
        if (!(lambda[k] > 0.0))
            throw std::invalid_argument("lambda must be positive at node " + std::to_string(k + 1));

    constexpr double kFloor = 1e-12;
    std::vector<double> alpha(n), v(n), A(n);
    for (std::size_t k = n; k >= 1; --k) {
        const NodeId i = static_cast<NodeId>(k);
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        const bool leaf = 2 * k > n;
        double vHalf = 0, AHalf = 0;
        if (!leaf) {
            vHalf = 0.5 * (v[2 * k - 1] + v[2 * k]);
            AHalf = 0.5 * (A[2 * k - 1] + A[2 * k]);
        }
        // Mirror computeAggregates' arithmetic so margins vanish to rounding.
        const double a = std::pow(lambda[k - 1] / len, 1.0 / exp.pConj);
        v[k - 1] = std::pow(a, exp.pConj) + vHalf;
        const double vp = std::pow(v[k - 1], exp.p);
        const double head = v[k - 1] - AHalf;
        if (head > 0) {
            alpha[k - 1] = len * head / vp;
            A[k - 1] = head + AHalf;  // alpha v^p / |I| + AHalf = v exactly
        } else {
            alpha[k - 1] = kFloor;
            A[k - 1] = kFloor * vp / len + AHalf;
            if (unsaturatable) unsaturatable->push_back(i);
        }
    }
    return alpha;
}

namespace {

double normP(const std::vector<double>& x, double p) {
    double s = 0;
    for (double xi : x) s += std::pow(std::abs(xi), p);
    return std::pow(s, 1.0 / p);
}

double norm2(const std::vector<double>& x) {
    double s = 0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
}

void projectNormalize(std::vector<double>& x, double p) {
    for (double& xi : x) xi = std::max(xi, 0.0);
    const double nrm = normP(x, p);
    if (!(nrm > 0.0)) throw std::runtime_error("ascent iterate collapsed to zero");
    for (double& xi : x) xi /= nrm;
}

struct RatioProblem {
    // homogeneous ratio N/D: value plus the gradients of both parts
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> numeratorGrad;
    std::function<std::vector<double>(const std::vector<double>&)> denominatorGrad;
    std::size_t dim = 0;
};

// Projected ascent along the ratio gradient grad N - R grad D (whose zeros
// are exactly the stationary points on the sphere ||x||_p = 1). Rejected
// steps halve the step size, so accepted ratios are monotone and iterates
// settle onto the maximizer.
MaximizeResult ascend(const RatioProblem& prob, const Exponent& exp,
                      const MaximizeOptions& opts, std::uint64_t seed,
                      const std::vector<std::vector<double>>& extraStarts) {
    MaximizeResult best;
    best.ratio = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> starts = extraStarts;
    for (int s = 0; s < opts.multistarts; ++s) {
        Stream st(seed, static_cast<std::uint64_t>(s));
        std::vector<double> x(prob.dim);
        for (double& xi : x) xi = st.logUniform(0.25, 4.0);
        starts.push_back(std::move(x));
    }

    std::vector<double> g(prob.dim), y(prob.dim);
    for (auto& x0 : starts) {
        std::vector<double> x = x0;
        projectNormalize(x, exp.p);
        double r = prob.value(x);
        double localBest = r;
        std::vector<double> localArg = x;
        double step = opts.step;
        int sinceImprove = 0;
        long iters = 0;
        for (int it = 0; it < opts.iters && step > 1e-12; ++it) {
            const std::vector<double> gN = prob.numeratorGrad(x);
            const std::vector<double> gD = prob.denominatorGrad(x);
            for (std::size_t k = 0; k < prob.dim; ++k) g[k] = gN[k] - r * gD[k];
            for (double gi : g)
                if (!std::isfinite(gi))
                    throw std::runtime_error("non-finite ascent gradient at ratio " +
                                             std::to_string(localBest));
            const double gn = norm2(g);
            if (!(gn > 0.0)) break;
            for (std::size_t k = 0; k < prob.dim; ++k) y[k] = x[k] + step * g[k] / gn;
            projectNormalize(y, exp.p);
            const double ry = prob.value(y);
            ++iters;
            if (ry > r) {
                const bool significant = ry - r > opts.improveTol * std::max(1.0, ry);
                x = y;
                r = ry;
                if (r > localBest) {
                    localBest = r;
                    localArg = x;
                }
                sinceImprove = significant ? 0 : sinceImprove + 1;
            } else {
                step *= 0.5;
                ++sinceImprove;
            }
            if (sinceImprove > opts.patience) break;
        }
        if (localBest > best.ratio) {
            best.ratio = localBest;
            best.arg = localArg;
        }
        best.itersUsed += iters;
    }
    return best;
}

} // namespace

MaximizeResult maximizeRatio(const TreeInstance& inst, const Exponent& exp,
                             const MaximizeOptions& opts, std::uint64_t seed) {
    {
        const NodeAggregates agg = computeAggregates(inst, exp);
        double scale = 1.0;
        for (double vk : agg.v) scale = std::max(scale, vk);
        for (std::size_t k = 0; k < agg.v.size(); ++k)
            if (agg.v[k] - agg.A[k] < -1e-9 * scale)
                throw std::invalid_argument("testing condition fails at node " +
                                            std::to_string(k + 1));
    }

    const std::size_t n = inst.nodeCount();
    // lambda^{1/p'} and alpha/|I| are reused every iteration.
    std::vector<double> lamQ(n), alphaOverLen(n);
    for (NodeId i = 1; i <= n; ++i) {
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        lamQ[i - 1] = std::pow(inst.lambda(i), 1.0 / exp.pConj);
        alphaOverLen[i - 1] = inst.alpha(i) / len;
    }

    // f_I for the current phi, bottom-up with the fixed (local, kids) order.
    const auto fillF = [&](const std::vector<double>& phi, std::vector<double>& f) {
        for (std::size_t k = n; k >= 1; --k) {
            const double invLen = std::ldexp(1.0, TreeInstance::level(static_cast<NodeId>(k)));
            double half = 0;
            if (2 * k <= n) half = 0.5 * (f[2 * k - 1] + f[2 * k]);
            f[k - 1] = phi[k - 1] * lamQ[k - 1] * invLen + half;
        }
    };

    RatioProblem prob;
    prob.dim = n;
    std::vector<double> fbuf(n), gbuf(n), abuf(n);
    prob.value = [&, fbuf](const std::vector<double>& phi) mutable -> double {
        fillF(phi, fbuf);
        double num = 0, den = 0;
        for (std::size_t k = 0; k < n; ++k) {
            num += inst.alpha(static_cast<NodeId>(k + 1)) * std::pow(fbuf[k], exp.p);
            den += std::pow(phi[k], exp.p);
        }
        return num / den;
    };
    prob.numeratorGrad = [&, fbuf, gbuf, abuf](const std::vector<double>& phi) mutable
        -> std::vector<double> {
        fillF(phi, fbuf);
        // dN/dphi_K = p lambda_K^{1/p'} sum_{I >= K} alpha_I f_I^{p-1} / |I|,
        // an ancestor sum computed top-down.
        for (std::size_t k = 0; k < n; ++k)
            abuf[k] = alphaOverLen[k] * std::pow(fbuf[k], exp.p - 1.0);
        gbuf[0] = abuf[0];
        for (std::size_t k = 2; k <= n; ++k) gbuf[k - 1] = gbuf[k / 2 - 1] + abuf[k - 1];
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k) g[k] = exp.p * lamQ[k] * gbuf[k];
        return g;
    };
    prob.denominatorGrad = [&](const std::vector<double>& phi) -> std::vector<double> {
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k) g[k] = exp.p * std::pow(phi[k], exp.p - 1.0);
        return g;
    };

    // Deterministic start: the saturating test function lambda^{1/p}.
    std::vector<double> satStart(n);
    for (std::size_t k = 0; k < n; ++k)
        satStart[k] = std::pow(inst.lambda(static_cast<NodeId>(k + 1)), 1.0 / exp.p);

    return ascend(prob, exp, opts, seed, {satStart});
}

MaximizeResult maximizeDualRatio(const TreeInstance& inst, const Exponent& exp,
                                 const MaximizeOptions& opts, std::uint64_t seed,
                                 const std::vector<double>* warmStart) {
    const std::size_t n = inst.nodeCount();
    std::vector<double> omega(n);
    for (NodeId i = 1; i <= n; ++i) {
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        omega[i - 1] = std::pow(inst.alpha(i) / std::pow(len, exp.p), 1.0 / (1.0 - exp.p));
    }
    const double q = exp.pConj;

    const auto fillS = [&](const std::vector<double>& psi, std::vector<double>& s) {
        s[0] = psi[0];
        for (std::size_t k = 2; k <= n; ++k) s[k - 1] = s[k / 2 - 1] + psi[k - 1];
    };

    RatioProblem prob;
    prob.dim = n;
    std::vector<double> sbuf(n), tbuf(n);
    prob.value = [&, sbuf](const std::vector<double>& psi) mutable -> double {
        fillS(psi, sbuf);
        double num = 0, den = 0;
        for (std::size_t k = 0; k < n; ++k) {
            num += inst.lambda(static_cast<NodeId>(k + 1)) * std::pow(sbuf[k], q);
            den += std::pow(psi[k], q) * omega[k];
        }
        return num / den;
    };
    prob.numeratorGrad = [&, sbuf, tbuf](const std::vector<double>& psi) mutable
        -> std::vector<double> {
        fillS(psi, sbuf);
        // dN/dpsi_K = q sum_{I in subtree(K)} lambda_I (S psi)_I^{q-1}, bottom-up.
        for (std::size_t k = n; k >= 1; --k) {
            double kids = 0;
            if (2 * k <= n) kids = tbuf[2 * k - 1] + tbuf[2 * k];
            tbuf[k - 1] = inst.lambda(static_cast<NodeId>(k)) * std::pow(sbuf[k - 1], q - 1.0) + kids;
        }
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k) g[k] = q * tbuf[k];
        return g;
    };
    prob.denominatorGrad = [&, q, omega](const std::vector<double>& psi) -> std::vector<double> {
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k)
            g[k] = q * std::pow(psi[k], q - 1.0) * omega[k];
        return g;
    };

    std::vector<std::vector<double>> extra;
    if (warmStart) {
        if (warmStart->size() != n)
            throw std::invalid_argument("warm start has wrong length");
        extra.push_back(*warmStart);
    }

    // The dual iterates live in l^{p'}; normalize with the conjugate exponent.
    const Exponent dualNorm(exp.pConj);
    return ascend(prob, dualNorm, opts, seed, extra);
}

std::string familyName(LambdaFamily family) {
    switch (family) {
        case LambdaFamily::Uniform: return "uniform";
        case LambdaFamily::Geometric: return "geometric";
        case LambdaFamily::Random: return "random";
    }
    throw std::logic_error("unreachable");
}

LambdaFamily familyFromName(const std::string& name) {
    if (name == "uniform") return LambdaFamily::Uniform;
    if (name == "geometric") return LambdaFamily::Geometric;
    if (name == "random") return LambdaFamily::Random;
    throw std::invalid_argument("unknown lambda family '" + name +
                                "' (expected uniform|geometric|random)");
}

std::vector<double> makeLambdaFamily(LambdaFamily family, int depth,
                                     double geomExponent, std::uint64_t seed) {
    const std::size_t n = nodeCountForDepth(depth);
    std::vector<double> lambda(n);
    for (NodeId i = 1; i <= n; ++i) {
        const double len = std::ldexp(1.0, -TreeInstance::level(i));
        switch (family) {
            case LambdaFamily::Uniform: lambda[i - 1] = len; break;
            case LambdaFamily::Geometric: lambda[i - 1] = std::pow(len, geomExponent); break;
            case LambdaFamily::Random: {
                Stream st(seed, i);
                lambda[i - 1] = st.logUniform(0.25, 4.0);
                break;
            }
        }
    }
    return lambda;
}

std::vector<SweepRow> pSweep(int depth, LambdaFamily family,
                             const std::vector<double>& pGrid, std::uint64_t seed,
                             const MaximizeOptions& opts, double geomExponent) {
    std::vector<SweepRow> rows;
    rows.reserve(pGrid.size());
    for (double p : pGrid) {
        if (!(p > 1.0)) throw std::invalid_argument("p grid entries must exceed 1");
        const Exponent exp(p);
        const std::vector<double> lambda = makeLambdaFamily(family, depth, geomExponent, seed);
        const std::vector<double> alpha = saturatingAlpha(depth, lambda, exp);
        std::vector<double> phi(lambda.size(), 1.0);
        const TreeInstance inst = TreeInstance::build(depth, alpha, lambda, phi);
        const MaximizeResult res = maximizeRatio(inst, exp, opts, seed);
        SweepRow row;
        row.p = p;
        row.depth = depth;
        row.family = familyName(family);
        row.ratio = res.ratio;
        row.cP = exp.cP;
        row.fraction = res.ratio / exp.cP;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace hardy
