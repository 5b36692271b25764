#include "mechlab/mechanisms.hpp"

#include <algorithm>
#include <cmath>

#include "mechlab/numerics.hpp"

namespace mechlab {

namespace {

// Lower edge for root brackets; avoids evaluating densities exactly at 0.
constexpr double kEdge = 1e-12;

void require_regular(const Distribution& F) {
    auto rep = F.check_regular(2049);
    if (!rep.regular)
        throw numeric_error("value distribution is not regular near theta = " +
                            std::to_string(rep.violation_lo));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::string to_string(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::EAFP: return "EAFP";
        case MechanismKind::EPO: return "EPO";
        case MechanismKind::EAO: return "EAO";
        case MechanismKind::Dynamic: return "D";
    }
    return "?";
}

MechanismKind mechanism_kind_from_string(const std::string& s) {
    if (s == "EAFP" || s == "eafp") return MechanismKind::EAFP;
    if (s == "EPO" || s == "epo") return MechanismKind::EPO;
    if (s == "EAO" || s == "eao") return MechanismKind::EAO;
    if (s == "D" || s == "d") return MechanismKind::Dynamic;
    throw config_error("unknown mechanism kind: " + s);
}

ExPostPriceRule::ExPostPriceRule(const Distribution& value_dist,
                                 double theta_bar)
    : value_dist_(&value_dist),
      theta_bar_(theta_bar),
      theta_low_(theta_star_star(value_dist, theta_bar)) {}

std::optional<double> ExPostPriceRule::price(double omega) const {
    if (omega > theta_bar_) return std::nullopt;  // psi(theta_bar,theta_bar)
    if (omega <= 0.0) return theta_low_;
    auto r = num::find_root(
        [&](double p) {
            return value_dist_->virtual_valuation_safe(p, theta_bar_) - omega;
        },
        std::max(kEdge, theta_low_ - 1e-9), theta_bar_, 1e-10);
    return r.x;
}

MechanismSolution solve_eafp(const Distribution& F, const Distribution& G) {
    require_regular(F);
    const double expected_cost = G.mean();
    auto root = num::find_root(
        [&](double p) {
            return F.virtual_valuation_safe(p, 1.0) - expected_cost;
        },
        kEdge, 1.0, 1e-10);
    MechanismSolution s;
    s.kind = MechanismKind::EAFP;
    s.price0 = root.x;
    s.profit = (1.0 - F.cdf(root.x)) * (root.x - expected_cost);
    return s;
}

double fixed_price_profit(const Distribution& F, const Distribution& G,
                          double x) {
    return num::integrate(
               [&](double theta) {
                   double psi = F.virtual_valuation_safe(theta, 1.0);
                   return G.left_integral(clamp01(psi)) * F.pdf(theta);
               },
               x, 1.0, 1e-9)
        .value;
}

MechanismSolution solve_epo(const Distribution& F, const Distribution& G,
                            double delta) {
    require_regular(F);
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::domain_error("solve_epo: delta outside [0,1]");
    double theta_star = theta_star_star(F, 1.0);
    MechanismSolution s;
    s.kind = MechanismKind::EPO;
    s.theta_star = theta_star;
    s.profit = delta * fixed_price_profit(F, G, theta_star);
    s.delta = delta;
    return s;
}

MechanismSolution solve_eao(const Distribution& F, const Distribution& G) {
    auto m = num::maximize_1d(
        [&](double p) { return (1.0 - F.cdf(p)) * G.left_integral(p); }, 0.0,
        1.0);
    MechanismSolution s;
    s.kind = MechanismKind::EAO;
    s.price0 = m.argmax;
    s.profit = m.value;
    s.scan_ties = std::move(m.ties);
    return s;
}

double theta_star_star(const Distribution& F, double theta_bar) {
    if (!(theta_bar > 0.0 && theta_bar <= 1.0))
        throw std::domain_error("theta_star_star: theta_bar outside (0,1]");
    auto r = num::find_root(
        [&](double t) { return F.virtual_valuation_safe(t, theta_bar); },
        kEdge * theta_bar, theta_bar, 1e-12);
    return r.x;
}

namespace {

// delta-free part of the waiting option: int G(psi(theta,theta_bar)) dtheta
double waiting_integral(const Distribution& F, const Distribution& G,
                        double theta_bar, double theta_low) {
    return num::integrate(
               [&](double theta) {
                   double psi = F.virtual_valuation_safe(theta, theta_bar);
                   return G.cdf(clamp01(psi));
               },
               theta_low, theta_bar, 1e-9)
        .value;
}

// int leftIntegral(psi(theta,theta_bar)) f(theta) dtheta
double continuation_integral(const Distribution& F, const Distribution& G,
                             double theta_bar, double theta_low) {
    return num::integrate(
               [&](double theta) {
                   double psi = F.virtual_valuation_safe(theta, theta_bar);
                   return G.left_integral(clamp01(psi)) * F.pdf(theta);
               },
               theta_low, theta_bar, 1e-9)
        .value;
}

}  // namespace

double coasian_p0(const Distribution& F, const Distribution& G,
                  double theta_bar, double delta) {
    double tl = theta_star_star(F, theta_bar);
    return theta_bar - delta * waiting_integral(F, G, theta_bar, tl);
}

double eafp_profit_at(const Distribution& F, const Distribution& G, double x) {
    return (1.0 - F.cdf(x)) * (x - G.mean());
}

double dynamic_profit(const Distribution& F, const Distribution& G,
                      double theta_bar, double delta) {
    double tl = theta_star_star(F, theta_bar);
    double survive = 1.0 - F.cdf(theta_bar);
    double wait = waiting_integral(F, G, theta_bar, tl);
    double cont = continuation_integral(F, G, theta_bar, tl);
    return survive * (theta_bar - delta * wait - G.mean()) + delta * cont;
}

double phi_cap(const Distribution& F, const Distribution& G, double x) {
    double tl = theta_star_star(F, x);
    return continuation_integral(F, G, x, tl) -
           (1.0 - F.cdf(x)) * waiting_integral(F, G, x, tl);
}

MechanismSolution solve_dynamic(const Distribution& F, const Distribution& G,
                                double delta) {
    require_regular(F);
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("solve_dynamic: delta outside (0,1)");
    auto m = num::maximize_1d(
        [&](double tb) { return dynamic_profit(F, G, tb, delta); }, 1e-6, 1.0);
    MechanismSolution s;
    s.kind = MechanismKind::Dynamic;
    s.theta_bar = m.argmax;
    s.theta_star = theta_star_star(F, m.argmax);
    s.price0 = coasian_p0(F, G, m.argmax, delta);
    s.profit = m.value;
    s.delta = delta;
    s.scan_ties = std::move(m.ties);
    return s;
}

ExPostPriceRule ex_post_rule(const Distribution& F,
                             const MechanismSolution& s) {
    return ExPostPriceRule(F, s.theta_bar.value_or(1.0));
}

RegimeThresholds regime_thresholds(const Distribution& F,
                                   const Distribution& G) {
    require_regular(F);
    double theta_star = theta_star_star(F, 1.0);
    double base = fixed_price_profit(F, G, theta_star);  // pi_epo at delta=1
    double pi_eafp = solve_eafp(F, G).profit;
    double pi_eao = solve_eao(F, G).profit;

    RegimeThresholds t;
    t.delta_star = pi_eafp / base;
    t.delta_bar = pi_eao / base;
    if (!(t.delta_star > 0.0 && t.delta_star < 1.0) ||
        !(t.delta_bar > 0.0 && t.delta_bar < 1.0))
        throw numeric_error("regime_thresholds: ratio thresholds outside (0,1)");

    auto gap = [&](double delta) {
        return solve_dynamic(F, G, delta).profit - pi_eao;
    };
    double lo = 1e-3, hi = 1.0 - 1e-7;
    if (!(gap(lo) < 0.0 && gap(hi) > 0.0))
        throw numeric_error(
            "regime_thresholds: no sign change for delta_double_star");
    t.delta_double_star = num::find_root(gap, lo, hi, 1e-10).x;

    if (!(t.delta_double_star < t.delta_bar && t.delta_star < t.delta_bar))
        throw numeric_error("regime_thresholds: threshold ordering violated");
    return t;
}

ComparisonReport compare(const Distribution& F, const Distribution& G,
                         double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("compare: delta outside (0,1)");
    ComparisonReport r;
    r.pi_eafp = solve_eafp(F, G).profit;
    r.pi_epo = solve_epo(F, G, delta).profit;
    r.pi_eao = solve_eao(F, G).profit;
    r.pi_d = solve_dynamic(F, G, delta).profit;
    r.best = MechanismKind::EAFP;
    double best = r.pi_eafp;
    if (r.pi_epo > best) { best = r.pi_epo; r.best = MechanismKind::EPO; }
    if (r.pi_eao > best) { best = r.pi_eao; r.best = MechanismKind::EAO; }
    if (r.pi_d > best) { best = r.pi_d; r.best = MechanismKind::Dynamic; }
    return r;
}

}  // namespace mechlab
