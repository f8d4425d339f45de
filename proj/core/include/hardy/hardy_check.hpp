#pragma once

#include <utility>
#include <vector>

#include "hardy/exponent.hpp"
#include "hardy/tree.hpp"

namespace hardy {

/// Data of the rewritten inequality: eta(I) = phi(I) lambda_I^{-1/p},
/// omega_I = (alpha_I/|I|^p)^{1/(1-p)}, and a dual test function psi >= 0.
struct DualData {
    std::vector<double> eta;
    std::vector<double> omega;
    std::vector<double> psi;
};

DualData makeDualData(const TreeInstance& inst, const Exponent& exp,
                      std::vector<double> psi);

/// (1/|I0|) sum_I alpha_I f_I^p with |I0| = 1.
double hardyLhs(const NodeAggregates& agg, const TreeInstance& inst, const Exponent& exp);

/// C(p) * F_root.
double hardyRhs(const NodeAggregates& agg, const Exponent& exp);

/// sum_I alpha_I f_I^p / sum_I phi(I)^p. Throws when phi is identically zero.
double hardyRatio(const TreeInstance& inst, const Exponent& exp);

/// Both inequality sides on the subtree rooted at `node`, with the test
/// function set to lambda^{1/p} there and the node taken as the root of its
/// own tree (original interval lengths kept). The pair equals (A_I, v_I).
std::pair<double, double> necessityIdentity(const TreeInstance& inst,
                                            const Exponent& exp, NodeId node);

/// Output at node I is the sum of psi over the root-to-I path (one top-down pass).
std::vector<double> ancestorSum(const std::vector<double>& psi, const TreeInstance& inst);

/// sum_I (S psi)(I) eta(I) lambda_I - sum_J psi(J) sum_{K in subtree(J)} eta(K) lambda_K.
/// A summation-exchange identity; zero up to rounding.
double adjointnessGap(const std::vector<double>& eta, const std::vector<double>& psi,
                      const TreeInstance& inst);

/// sum_I lambda_I (S psi)(I)^{p'} / sum_I psi(I)^{p'} omega_I.
/// Throws when psi is identically zero.
double dualRatio(const TreeInstance& inst, const std::vector<double>& psi,
                 const Exponent& exp);

/// The dual test function at which the dual ratio attains the primal value:
/// psi_I = (alpha_I/|I|^p) * (|I| f_I)^{p-1} for the given phi.
std::vector<double> dualCertificate(const TreeInstance& inst, const Exponent& exp,
                                    const std::vector<double>& phi);

} // namespace hardy
