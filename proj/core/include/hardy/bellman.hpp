#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "hardy/exponent.hpp"
#include "hardy/tree.hpp"

namespace hardy {

/// A point (F, f, A, v) of the state space of the certificate function.
struct BellmanPoint {
    double F = 0, f = 0, A = 0, v = 0;
};

/// Default membership tolerance and the floor standing in for the strict
/// inequalities A > 0, v > 0.
inline constexpr double kDomainTol = 1e-9;
inline constexpr double kPositiveFloor = 1e-300;

enum DomainViolation : unsigned {
    kViolatesFSign = 1u << 0,   // F < -tol
    kViolatesfSign = 1u << 1,   // f < -tol
    kViolatesAPositive = 1u << 2,
    kViolatesVPositive = 1u << 3,
    kViolatesVGeA = 1u << 4,    // v < A (scale-aware slack)
    kViolatesHolder = 1u << 5,  // f^p > F v^{p-1}
};

struct DomainCheck {
    unsigned violated = 0;
    bool ok() const noexcept { return violated == 0; }
    std::string describe() const;
};

/// Tolerant membership in {F>=0, f>=0, A>0, v>0, v>=A, f^p <= F v^{p-1}}.
/// Sign constraints use absolute slack tol; v>=A and the Holder constraint
/// use slack relative to max(1, scale); A,v positivity uses the 1e-300 floor.
DomainCheck inDomain(const BellmanPoint& x, const Exponent& exp, double tol = kDomainTol);

/// Membership in the closure (A, v >= 0 allowed); Holder gets a small
/// relative slack so that states sitting on the surface are kept.
DomainCheck inClosure(const BellmanPoint& x, const Exponent& exp, double tol = 1e-12);

/// B(F,f,A,v) = (p/(p-1))^p F - p^p/(p-1) * f^p / (A+(p-1)v)^{p-1}.
/// Throws std::domain_error (with the failed constraints) outside the domain.
double bellmanValue(const BellmanPoint& x, const Exponent& exp);

/// B without the membership check; caller guarantees A+(p-1)v > 0.
double bellmanValueUnchecked(const BellmanPoint& x, const Exponent& exp) noexcept;

struct BellmanDerivatives {
    std::array<double, 4> grad;                 // dB/d(F,f,A,v)
    std::array<std::array<double, 4>, 4> hess;  // symmetric, F row/col zero
};

/// Analytic gradient and Hessian; requires an interior point. For p < 2 the
/// Hessian is singular as f -> 0 (f^{p-2} term) and f = 0 throws.
BellmanDerivatives bellmanDerivatives(const BellmanPoint& x, const Exponent& exp);

/// Eigenvalues of the analytic Hessian: {0, 0, 0, extreme}. The Hessian is
/// rank one, so the extreme eigenvalue equals the trace:
///   -p^{p+1} [ f^{p-2}/S^{p-1} + (1+(p-1)^2) f^p/S^{p+1} ],  S = A+(p-1)v.
/// Returned as {extreme, 0, 0, 0}; extreme <= 0. Throws for f = 0, p < 2.
std::array<double, 4> hessianSpectrum(const BellmanPoint& x, const Exponent& exp);

/// Eigenvalues {0, lambda2} of the Hessian of h(F,v) = F^{1/p} v^{1/p'};
/// lambda2 < 0 for F, v > 0.
std::array<double, 2> domainSupportConcavity(double F, double v, const Exponent& exp);

/// phi(y) = C(p) b^p - p^{p+1}/(p-1) y^{p-1} a b + (p-1) p^p y^p a^{p'},
/// nonnegative for y, a, b >= 0 with minimum 0 at y = b/((p-1) a^{p'-1}).
double midpointScalarGap(double y, double a, double b, const Exponent& exp);

/// The minimizer b/((p-1) a^{p'-1}); requires a > 0.
double midpointScalarMinimizer(double a, double b, const Exponent& exp);

enum class MarginKind { Strong, Weak };

/// The composed point (Ft+b^p, ft+ab, At+c, vt+a^{p'}) built from the
/// midpoint (Ft,ft,At,vt) of xm, xp.
BellmanPoint composeMidpoint(const BellmanPoint& xm, const BellmanPoint& xp,
                             double a, double b, double c, const Exponent& exp);

/// B(x) - [B(xm)+B(xp)]/2 - R with R = p^p f^p/(A+(p-1)v)^p * c (strong)
/// or R = f^p/v^p * c (weak), all evaluated at the composed point x.
/// The margin is >= 0 whenever xm, xp and x lie in the domain.
double midpointMargin(const BellmanPoint& xm, const BellmanPoint& xp,
                      double a, double b, double c, const Exponent& exp,
                      MarginKind kind);

/// (B(x), C(p) F - B(x)); both are >= 0 on the domain.
std::pair<double, double> boundsMargin(const BellmanPoint& x, const Exponent& exp);

/// Per-node certificate replay over a tree instance. For internal nodes the
/// margin is |I| B(x_I) - |I_-| B(x_-) - |I_+| B(x_+) - alpha_I f_I^p; at
/// leaves the children contribution is 0 and the margin is
/// |I| B(x_I) - alpha_I f_I^p. Summed over the tree the margins telescope to
///   sum_I alpha_I f_I^p <= |I0| B(x_root) <= |I0| C(p) F_root.
struct TelescopeReport {
    std::vector<double> margins;  // heap order, node i at [i-1]
    double weightedPayoff = 0;    // sum_I alpha_I f_I^p
    double rootValue = 0;         // |I0| B(x_root)
    double rootUpperBound = 0;    // |I0| C(p) F_root
    double minMargin = 0;
    /// Chain and margins hold up to slack tol * max(1, rootUpperBound).
    bool holds(double tol = kDomainTol) const;
};

/// Requires the testing condition (domain membership per node); a violation
/// at some node throws with that node named.
TelescopeReport telescopingReplay(const TreeInstance& inst, const Exponent& exp);

} // namespace hardy
