#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hardy/bellman.hpp"
#include "hardy/exponent.hpp"

namespace hardy {

/// Control value: diffusion loadings (u1..u4) against the shared scalar
/// Brownian motion, and the drift magnitude u5 >= 0 pulling the third state
/// coordinate down. Drift b(u) = (0,0,-u5,0), loadings sigma(u) = (u1..u4).
struct ControlVector {
    double u1 = 0, u2 = 0, u3 = 0, u4 = 0, u5 = 0;
};

/// A control rule evaluated at (time, state). Built-ins: "drift-only"
/// = (0,0,0,0,1); "zero"; "diffuse-then-drift(s)" = fixed loadings
/// (0.25, 0.25, 0.25, 0.25, 0) until time s, then drift-only. Piecewise
/// schedules hold a ControlVector per piece with sorted start times
/// (first piece starts at 0). Every emitted vector satisfies u5 >= 0.
class ControlPolicy {
public:
    static ControlPolicy driftOnly();
    static ControlPolicy zero();
    static ControlPolicy diffuseThenDrift(double switchTime);
    static ControlPolicy piecewise(std::vector<double> startTimes,
                                   std::vector<ControlVector> pieces);

    ControlVector at(double t, const BellmanPoint& x) const;
    const std::string& name() const noexcept { return name_; }

private:
    ControlPolicy() = default;
    std::string name_;
    std::vector<double> startTimes_;
    std::vector<ControlVector> pieces_;
};

/// One Euler-Maruyama trajectory. `exitState` is the last state inside the
/// closed domain (no projection); `exitTime` is the start time of the first
/// violating step, or the horizon when truncated. `bequestValue` is the
/// bequest at the exit state for exited paths and 0 when truncated (the
/// truncation is flagged); totalJ = payoffIntegral + bequestValue.
struct PathSample {
    double h = 0;
    std::vector<BellmanPoint> states;  // filled only when recording
    double exitTime = 0;
    bool truncated = false;
    BellmanPoint exitState;
    double payoffIntegral = 0;  // left-endpoint quadrature
    double bequestValue = 0;
    double totalJ = 0;
    std::size_t steps = 0;
};

/// f^u(x) = p^p (x2/(x3+(p-1)x4))^p u5. Throws on a nonpositive denominator.
double payoffDensity(const BellmanPoint& x, double u5, const Exponent& exp);

/// Continuous extension of the certificate function to the domain closure:
/// the formula wherever A+(p-1)v > 0, and 0 at the (F,0,0,0) corner.
/// Throws outside the closure.
double bequestExt(const BellmanPoint& x, const Exponent& exp);

/// Euler-Maruyama with scalar increments sqrt(h) N(0,1), streams keyed by
/// (seed, pathIndex, stepIndex). After each proposed step the closed domain
/// is tested; on the first violation the path exits at the last in-domain
/// state. Payoff accrues only over completed steps.
PathSample simulatePath(const BellmanPoint& x0, const ControlPolicy& policy,
                        const Exponent& exp, double h, double horizon,
                        std::uint64_t seed, std::uint64_t pathIndex,
                        bool recordStates = false);

struct ValueEstimate {
    double mean = 0;
    double standardError = 0;
    std::size_t paths = 0;
    std::size_t truncatedPaths = 0;
};

/// Sample mean and standard error of the horizon-truncated value over
/// independent paths: payoff plus the bequest at the exit state, with
/// truncated paths contributing the bequest at the final state. Results are
/// identical for any execution order (per-path streams, pairwise reduction).
ValueEstimate estimateValue(const BellmanPoint& x0, const ControlPolicy& policy,
                            const Exponent& exp, double h, double horizon,
                            std::size_t nPaths, std::uint64_t seed);

/// Raw mean over paths of totalJ (bequest only on exit). Non-decreasing in
/// the horizon pathwise.
ValueEstimate estimateValueRaw(const BellmanPoint& x0, const ControlPolicy& policy,
                               const Exponent& exp, double h, double horizon,
                               std::size_t nPaths, std::uint64_t seed);

/// Value of the drift-only control started at x0:
///   int_0^A p^p (f/(A-s+(p-1)v))^p ds + B(F,f,0,v),
/// which collapses to B(x0).
double optimalValueClosedForm(const BellmanPoint& x0, const Exponent& exp);

/// L^u B = -u5 dB/dA + (1/2) sum_{ij} H_ij u_i u_j (loadings part of u).
double generatorApplied(const BellmanPoint& x, const ControlVector& u, const Exponent& exp);

struct HjbScan {
    double maxResidual = 0;
    ControlVector argmax;
};

/// max over the grid of -dB/dA u5 + (1/2) u^T H u + f^u(x); <= 0 on the
/// domain, and exactly 0 (to rounding) at u = (0,0,0,0,u5).
HjbScan hjbResidual(const BellmanPoint& x, const Exponent& exp,
                    std::span<const ControlVector> grid);

/// Monte Carlo estimate of E[B(X_{tau^T})] - B(x0) - E[int_0^{tau^T} L^u B dt]
/// with the generator evaluated analytically along paths (left endpoints).
ValueEstimate dynkinGap(const BellmanPoint& x0, const ControlPolicy& policy,
                        const Exponent& exp, double h, double horizon,
                        std::size_t nPaths, std::uint64_t seed);

} // namespace hardy
