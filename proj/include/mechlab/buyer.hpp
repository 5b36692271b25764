#pragma once

#include <optional>

#include "mechlab/distribution.hpp"
#include "mechlab/mechanisms.hpp"

// Mirror problem where the buyer is the principal: the seller knows her cost
// at time 0 and the buyer only learns the value at time 1. Uniform laws only.

namespace mechlab::buyer {

struct BuyerSolution {
    MechanismKind kind = MechanismKind::EAFP;
    std::optional<double> price;      // P, or P0 for the dynamic mechanism
    std::optional<double> omega_bar;  // dynamic acceptance threshold
    double utility = 0.0;
    std::optional<double> delta;
};

BuyerSolution solve_buyer(MechanismKind kind, double delta);
// Overload that rejects non-uniform inputs.
BuyerSolution solve_buyer(const Distribution& F, const Distribution& G,
                          MechanismKind kind, double delta);

// Buyer's expected utility from the dynamic mechanism at a given seller
// acceptance threshold.
double dynamic_utility(double omega_bar, double delta);

// Closed form for the dynamic threshold; equals 1 - theta_bar*(delta) of the
// seller-side problem.
double omega_bar_closed_form(double delta);

// Time-0 price holding the marginal seller indifferent.
double dynamic_p0(double omega_bar, double delta);

}  // namespace mechlab::buyer
