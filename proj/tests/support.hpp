#pragma once

#include <vector>

#include "pmrd/network.hpp"

namespace pmrd::testing {

/// Reaction system with unit diffusion coefficients and rate constants.
inline ReactionSystem reaction(std::vector<double> alpha, std::vector<double> beta,
                               double m = 2.0, double p = 2.0) {
    ReactionSystem sys;
    sys.d.assign(alpha.size(), 1.0);
    sys.m.assign(alpha.size(), m);
    sys.h.assign(beta.size(), 1.0);
    sys.p.assign(beta.size(), p);
    sys.alpha = std::move(alpha);
    sys.beta = std::move(beta);
    return sys;
}

}  // namespace pmrd::testing
