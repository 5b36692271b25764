#pragma once

#include <vector>

#include "mechlab/distribution.hpp"

// At-will variants of the dynamic mechanism (uniform value and cost laws
// only): D1 ends the game when the seller reneges, D2 lets her post one more
// price afterwards.

namespace mechlab::atwill {

struct D1Solution {
    double theta_bar = 1.0;
    double p0 = 1.0;
    double profit = 0.0;
    bool epo_equivalent = false;  // theta_bar == 1: nobody accepts at time 0
};

D1Solution solve_d1(double delta);
// Overload that rejects non-uniform inputs.
D1Solution solve_d1(const Distribution& F, const Distribution& G, double delta);

// Profit of the D1 mechanism at an arbitrary acceptance threshold.
double d1_profit_at(double theta_bar, double delta);

// Closed form for the D1 acceptance threshold.
double d1_theta_bar_closed_form(double delta);

struct D2Residual {
    double value = 0.0;
    bool high_branch = true;  // omega_bar > 2*theta_bar - 1
};

// Indifference-condition residual for a (theta_bar, omega_bar) pair; a zero
// identifies a candidate equilibrium of the renege-then-reoffer game.
D2Residual d2_residual(double theta_bar, double omega_bar, double delta);

// Seller profit at a candidate; p0 is read off the residual equation.
double d2_profit(double theta_bar, double omega_bar, double delta);

struct D2Solution {
    bool epo_equivalent = false;  // no candidate on the grid
    double theta_bar = 1.0;
    double omega_bar = 1.0;
    double p0 = 1.0;
    bool high_branch = true;
    bool near_degenerate = false;  // omega_bar within grid step of {0,1}
    double profit = 0.0;
};

// Sweeps omega_bar over a 2001-point grid, root-solves theta_bar per branch,
// and keeps the most profitable candidate (locally refined). Returns the
// EPO-equivalent flag when the constraint has no solution on the grid.
D2Solution solve_d2(double delta);
D2Solution solve_d2(const Distribution& F, const Distribution& G, double delta);

}  // namespace mechlab::atwill
