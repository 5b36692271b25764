#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "mechlab/buyer.hpp"
#include "mechlab/distribution.hpp"
#include "mechlab/mechanisms.hpp"

// Independent verification layer: plays solved mechanisms against sampled
// (theta, omega) draws and hosts the discretized brute-force price oracle.

namespace mechlab::mc {

enum class Stage { T0, T1, None };

struct Outcome {
    Stage stage = Stage::None;
    bool traded = false;
    double transfer = 0.0;
    bool canceled = false;  // at-will refund after acceptance
};

struct OutcomeRule {
    std::function<Outcome(double theta, double omega)> eval;
};

// Realized-play map for a seller-side solution. The rule may reference F;
// keep the distribution alive while simulating.
OutcomeRule build_rule(const MechanismSolution& solution, const Distribution& F,
                       const Distribution& G);

// Realized-play map for a buyer-side (uniform) solution.
OutcomeRule build_buyer_rule(const buyer::BuyerSolution& solution);

struct SimEstimate {
    double profit_mean = 0.0;
    double profit_se = 0.0;
    double buyer_surplus_mean = 0.0;
    double buyer_surplus_se = 0.0;
    double trade_prob = 0.0;
    long long n = 0;
    std::uint64_t seed = 0;
};

// i.i.d. inverse-cdf draws; per-draw streams are derived from (seed, index)
// so results are bit-identical regardless of evaluation order. Time-0 trades
// count undiscounted, time-1 trades carry factor delta.
SimEstimate simulate(const OutcomeRule& rule, const Distribution& F,
                     const Distribution& G, double delta, long long n,
                     std::uint64_t seed);

// Evaluates the analytic posted-price objective on an m-point grid with its
// own quadrature route; oracle for the EAFP and EAO optima.
std::pair<double, double> brute_force_price(const Distribution& F,
                                            const Distribution& G,
                                            MechanismKind kind, int m);

}  // namespace mechlab::mc
