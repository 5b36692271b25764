#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mechlab/distribution.hpp"

namespace mechlab {

enum class MechanismKind { EAFP, EPO, EAO, Dynamic };

std::string to_string(MechanismKind kind);
MechanismKind mechanism_kind_from_string(const std::string& s);

struct MechanismSolution {
    MechanismKind kind = MechanismKind::EAFP;
    std::optional<double> price0;     // p, or p0 for the dynamic mechanism
    std::optional<double> theta_bar;  // dynamic acceptance threshold
    std::optional<double> theta_star; // EPO cutoff, or theta**(theta_bar*)
    double profit = 0.0;
    std::optional<double> delta;
    std::vector<double> scan_ties;    // coarse-scan argmax ties, when solved by scan
};

// Ex-post posted price schedule under beliefs truncated at theta_bar:
// price(omega) solves psi(p, theta_bar) = omega, empty when omega > theta_bar.
class ExPostPriceRule {
public:
    ExPostPriceRule(const Distribution& value_dist, double theta_bar);

    std::optional<double> price(double omega) const;
    double theta_bar() const { return theta_bar_; }
    // Lowest served type, theta**(theta_bar): psi(theta, theta_bar) = 0.
    double theta_low() const { return theta_low_; }

private:
    const Distribution* value_dist_;
    double theta_bar_;
    double theta_low_;
};

// Time-0 posted price with specific performance: psi(p,1) = E[omega].
MechanismSolution solve_eafp(const Distribution& F, const Distribution& G);

// Wait-and-post mechanism; profit is delta * undiscounted ex-post profit.
MechanismSolution solve_epo(const Distribution& F, const Distribution& G,
                            double delta);

// Time-0 posted price with an at-will clause: max (1-F(p)) * leftIntegral(p).
MechanismSolution solve_eao(const Distribution& F, const Distribution& G);

// Guaranteed-delivery price at time 0 followed by an uncommitted ex-post
// posted price under truncated beliefs.
MechanismSolution solve_dynamic(const Distribution& F, const Distribution& G,
                                double delta);

// Price schedule attached to an EPO or Dynamic solution.
ExPostPriceRule ex_post_rule(const Distribution& F, const MechanismSolution& s);

// Lowest type served under beliefs truncated at theta_bar.
double theta_star_star(const Distribution& F, double theta_bar);

// Time-0 price making the marginal type indifferent to waiting.
double coasian_p0(const Distribution& F, const Distribution& G,
                  double theta_bar, double delta);

// Seller's time-0 expected profit from the dynamic mechanism at a given
// acceptance threshold.
double dynamic_profit(const Distribution& F, const Distribution& G,
                      double theta_bar, double delta);

// Marginal value of discounting in the dynamic mechanism:
// dynamic_profit(x, delta) = eafp_profit_at(x) + delta * phi_cap(x).
double phi_cap(const Distribution& F, const Distribution& G, double x);

// Specific-performance profit at an arbitrary price x.
double eafp_profit_at(const Distribution& F, const Distribution& G, double x);

// Undiscounted ex-post profit when serving types above x.
double fixed_price_profit(const Distribution& F, const Distribution& G,
                          double x);

struct RegimeThresholds {
    double delta_star = 0.0;        // EPO overtakes EAFP
    double delta_bar = 0.0;         // EPO overtakes EAO
    double delta_double_star = 0.0; // Dynamic overtakes EAO
};

RegimeThresholds regime_thresholds(const Distribution& F,
                                   const Distribution& G);

struct ComparisonReport {
    double pi_eafp = 0.0;
    double pi_epo = 0.0;
    double pi_eao = 0.0;
    double pi_d = 0.0;
    MechanismKind best = MechanismKind::EAO;
};

ComparisonReport compare(const Distribution& F, const Distribution& G,
                         double delta);

}  // namespace mechlab
