#pragma once

#include <cmath>
#include <stdexcept>

namespace hardy {

/// Holder exponent bundle: p, its conjugate p' = p/(p-1), and the
/// constant C(p) = (p/(p-1))^p = (p')^p.
struct Exponent {
    double p;
    double pConj;
    double cP;

    explicit Exponent(double p_) {
        if (!std::isfinite(p_) || !(p_ > 1.0))
            throw std::invalid_argument("Exponent: p must be finite and > 1");
        p = p_;
        pConj = p_ / (p_ - 1.0);
        cP = std::pow(pConj, p_);
    }
};

} // namespace hardy
