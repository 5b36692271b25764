#include "mechlab/montecarlo.hpp"

#include <cmath>
#include <memory>

#include "mechlab/numerics.hpp"

namespace mechlab::mc {

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double to_unit(std::uint64_t z) {
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Two uniforms for draw i, independent of evaluation order.
std::pair<double, double> draw_pair(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (i + 1));
    double u1 = to_unit(splitmix_next(state));
    double u2 = to_unit(splitmix_next(state));
    return {u1, u2};
}

}  // namespace

OutcomeRule build_rule(const MechanismSolution& solution, const Distribution& F,
                       const Distribution& G) {
    (void)G;
    switch (solution.kind) {
        case MechanismKind::EAFP: {
            double p = solution.price0.value();
            return {[p](double theta, double) {
                if (theta < p) return Outcome{};
                return Outcome{Stage::T0, true, p, false};
            }};
        }
        case MechanismKind::EAO: {
            double p = solution.price0.value();
            return {[p](double theta, double omega) {
                if (theta < p) return Outcome{};
                if (omega > p) return Outcome{Stage::T0, false, 0.0, true};
                return Outcome{Stage::T0, true, p, false};
            }};
        }
        case MechanismKind::EPO: {
            auto rule = std::make_shared<ExPostPriceRule>(F, 1.0);
            const Distribution* f = &F;
            return {[rule, f](double theta, double omega) {
                if (f->virtual_valuation_safe(theta, 1.0) < omega)
                    return Outcome{};
                auto p1 = rule->price(omega);
                if (!p1) return Outcome{};
                return Outcome{Stage::T1, true, *p1, false};
            }};
        }
        case MechanismKind::Dynamic: {
            double theta_bar = solution.theta_bar.value();
            double p0 = solution.price0.value();
            auto rule = std::make_shared<ExPostPriceRule>(F, theta_bar);
            const Distribution* f = &F;
            return {[rule, f, theta_bar, p0](double theta, double omega) {
                if (theta >= theta_bar) return Outcome{Stage::T0, true, p0, false};
                if (f->virtual_valuation_safe(theta, theta_bar) < omega)
                    return Outcome{};
                auto p1 = rule->price(omega);
                if (!p1) return Outcome{};
                return Outcome{Stage::T1, true, *p1, false};
            }};
        }
    }
    throw numeric_error("build_rule: unknown mechanism kind");
}

OutcomeRule build_buyer_rule(const buyer::BuyerSolution& solution) {
    switch (solution.kind) {
        case MechanismKind::EAFP: {
            double p = solution.price.value();
            return {[p](double, double omega) {
                if (omega > p) return Outcome{};
                return Outcome{Stage::T0, true, p, false};
            }};
        }
        case MechanismKind::EAO: {
            double p = solution.price.value();
            return {[p](double theta, double omega) {
                if (omega > p) return Outcome{};
                if (theta < p) return Outcome{Stage::T0, false, 0.0, true};
                return Outcome{Stage::T0, true, p, false};
            }};
        }
        case MechanismKind::EPO: {
            return {[](double theta, double omega) {
                double p = 0.5 * theta;
                if (omega > p) return Outcome{};
                return Outcome{Stage::T1, true, p, false};
            }};
        }
        case MechanismKind::Dynamic: {
            double omega_bar = solution.omega_bar.value();
            double p0 = solution.price.value();
            return {[omega_bar, p0](double theta, double omega) {
                if (omega <= omega_bar)
                    return Outcome{Stage::T0, true, p0, false};
                double p1 = 0.5 * (omega_bar + theta);
                if (omega > p1) return Outcome{};
                return Outcome{Stage::T1, true, p1, false};
            }};
        }
    }
    throw numeric_error("build_buyer_rule: unknown mechanism kind");
}

SimEstimate simulate(const OutcomeRule& rule, const Distribution& F,
                     const Distribution& G, double delta, long long n,
                     std::uint64_t seed) {
    if (n < 1) throw std::domain_error("simulate: n < 1");
    long double profit_sum = 0.0L, profit_sq = 0.0L;
    long double surplus_sum = 0.0L, surplus_sq = 0.0L;
    long long trades = 0;
    for (long long i = 0; i < n; ++i) {
        auto [u1, u2] = draw_pair(seed, static_cast<std::uint64_t>(i));
        double theta = F.quantile(u1);
        double omega = G.quantile(u2);
        Outcome out = rule.eval(theta, omega);
        double disc = (out.stage == Stage::T1) ? delta : 1.0;
        double profit = out.traded ? disc * (out.transfer - omega) : 0.0;
        double surplus = out.traded ? disc * (theta - out.transfer) : 0.0;
        profit_sum += profit;
        profit_sq += static_cast<long double>(profit) * profit;
        surplus_sum += surplus;
        surplus_sq += static_cast<long double>(surplus) * surplus;
        trades += out.traded ? 1 : 0;
    }
    SimEstimate est;
    est.n = n;
    est.seed = seed;
    est.profit_mean = static_cast<double>(profit_sum / n);
    est.buyer_surplus_mean = static_cast<double>(surplus_sum / n);
    est.trade_prob = static_cast<double>(trades) / static_cast<double>(n);
    if (n > 1) {
        long double var =
            (profit_sq - profit_sum * profit_sum / n) / (n - 1);
        if (var < 0.0L) var = 0.0L;
        est.profit_se = static_cast<double>(std::sqrt(var / n));
        long double svar =
            (surplus_sq - surplus_sum * surplus_sum / n) / (n - 1);
        if (svar < 0.0L) svar = 0.0L;
        est.buyer_surplus_se = static_cast<double>(std::sqrt(svar / n));
    }
    return est;
}

std::pair<double, double> brute_force_price(const Distribution& F,
                                            const Distribution& G,
                                            MechanismKind kind, int m) {
    if (m < 100) throw std::domain_error("brute_force_price: m < 100");
    if (kind != MechanismKind::EAFP && kind != MechanismKind::EAO)
        throw unsupported_error("brute_force_price: EAFP or EAO only");

    // independent quadrature route: composite Simpson on the raw cdf
    auto panel = [&](double a, double b) {
        return (b - a) / 6.0 *
               (G.cdf(a) + 4.0 * G.cdf(0.5 * (a + b)) + G.cdf(b));
    };
    double best_p = 0.0, best_v = -1.0;
    if (kind == MechanismKind::EAO) {
        double gcal = 0.0, prev = 0.0;
        for (int j = 0; j < m; ++j) {
            double p = static_cast<double>(j) / (m - 1);
            gcal += panel(prev, p);
            prev = p;
            double v = (1.0 - F.cdf(p)) * gcal;
            if (v > best_v) {
                best_v = v;
                best_p = p;
            }
        }
    } else {
        double mean = 1.0;  // E[omega] = 1 - int_0^1 G
        {
            double acc = 0.0, prev = 0.0;
            for (int j = 1; j <= 1000; ++j) {
                double x = static_cast<double>(j) / 1000.0;
                acc += panel(prev, x);
                prev = x;
            }
            mean -= acc;
        }
        for (int j = 0; j < m; ++j) {
            double p = static_cast<double>(j) / (m - 1);
            double v = (1.0 - F.cdf(p)) * (p - mean);
            if (v > best_v) {
                best_v = v;
                best_p = p;
            }
        }
    }
    return {best_p, best_v};
}

}  // namespace mechlab::mc
