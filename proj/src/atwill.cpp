#include "mechlab/atwill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mechlab/numerics.hpp"

namespace mechlab::atwill {

namespace {

void require_uniform(const Distribution& F, const Distribution& G,
                     const char* what) {
    if (!F.is_uniform() || !G.is_uniform())
        throw unsupported_error(std::string(what) +
                                ": only uniform distributions are supported");
}

void require_delta(double delta, const char* what) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error(std::string(what) + ": delta outside (0,1)");
}

double cube(double x) { return x * x * x; }

}  // namespace

double d1_theta_bar_closed_form(double delta) {
    double s = std::sqrt(1.0 - delta);
    return std::min((4.0 * s - 2.0 * delta + 4.0) / (6.0 * s - 5.0 * delta + 6.0),
                    1.0);
}

double d1_profit_at(double theta_bar, double delta) {
    double p0 = 0.5 * theta_bar * (std::sqrt(1.0 - delta) + 1.0);
    return (1.0 - theta_bar) * 0.5 * p0 * p0 + delta * cube(theta_bar) / 12.0;
}

D1Solution solve_d1(double delta) {
    require_delta(delta, "solve_d1");
    D1Solution s;
    s.theta_bar = d1_theta_bar_closed_form(delta);
    s.p0 = 0.5 * s.theta_bar * (std::sqrt(1.0 - delta) + 1.0);
    s.epo_equivalent = (s.theta_bar >= 1.0);
    s.profit = s.epo_equivalent ? delta / 12.0 : d1_profit_at(s.theta_bar, delta);
    return s;
}

D1Solution solve_d1(const Distribution& F, const Distribution& G,
                    double delta) {
    require_uniform(F, G, "solve_d1");
    return solve_d1(delta);
}

D2Residual d2_residual(double theta_bar, double omega_bar, double delta) {
    D2Residual r;
    r.high_branch = (omega_bar > 2.0 * theta_bar - 1.0);
    if (omega_bar <= 0.0) {
        r.value = std::numeric_limits<double>::infinity();
        return r;
    }
    double lhs = theta_bar - delta * theta_bar * theta_bar / (4.0 * omega_bar);
    double rhs;
    if (r.high_branch) {
        double d = 1.0 - theta_bar;
        rhs = (d > 0.0) ? omega_bar + delta * (1.0 - omega_bar) *
                                          (1.0 - omega_bar) / (4.0 * d)
                        : std::numeric_limits<double>::infinity();
    } else {
        rhs = omega_bar + delta * (theta_bar - omega_bar);
    }
    r.value = lhs - rhs;
    return r;
}

double d2_profit(double theta_bar, double omega_bar, double delta) {
    double p0 = theta_bar;
    if (omega_bar > 0.0)
        p0 -= delta * theta_bar * theta_bar / (4.0 * omega_bar);
    double profit = delta * cube(theta_bar) / 12.0 +
                    (1.0 - theta_bar) * omega_bar * (p0 - 0.5 * omega_bar);
    // continuation after the seller reneges and posts a second price
    if (omega_bar >= 2.0 * theta_bar - 1.0) {
        profit += delta * cube(1.0 - omega_bar) / 12.0;
    } else {
        double t = theta_bar, w = omega_bar;
        profit += delta * (1.0 - t) *
                  (4.0 * t * t - 6.0 * t * w - 2.0 * t + 3.0 * w * w + 1.0) /
                  6.0;
    }
    return profit;
}

namespace {

struct Candidate {
    double theta_bar;
    double profit;
    bool high_branch;
};

// Best candidate at a fixed omega_bar: scan each branch's theta_bar region
// for sign changes of the residual, bisect, and evaluate the profit.
std::optional<Candidate> best_candidate_at(double omega_bar, double delta) {
    constexpr int kScan = 257;
    constexpr double kLo = 1e-9;
    std::optional<Candidate> best;
    auto consider = [&](double theta_bar, bool high) {
        double p = d2_profit(theta_bar, omega_bar, delta);
        if (!best || p > best->profit) best = Candidate{theta_bar, p, high};
    };
    for (int branch = 0; branch < 2; ++branch) {
        bool high = (branch == 0);
        double split = 0.5 * (1.0 + omega_bar);  // omega_bar = 2 theta_bar - 1
        double a = high ? kLo : split;
        double b = high ? std::min(split, 1.0 - kLo) : 1.0 - kLo;
        if (!(b > a)) continue;
        auto resid = [&](double tb) {
            D2Residual r = d2_residual(tb, omega_bar, delta);
            return r.value;
        };
        double prev_x = a, prev_v = resid(a);
        for (int i = 1; i < kScan; ++i) {
            double x = a + (b - a) * i / (kScan - 1);
            double v = resid(x);
            // strict sign changes only: tangential zeros (the residual is a
            // negative perfect square at delta = 1/2) do not count as
            // solutions of the constraint
            if (std::isfinite(prev_v) && std::isfinite(v) && prev_v != 0.0 &&
                v != 0.0 && (prev_v > 0.0) != (v > 0.0)) {
                auto root = num::find_root(resid, prev_x, x, 1e-12);
                consider(root.x, high);
            }
            prev_x = x;
            prev_v = v;
        }
    }
    return best;
}

}  // namespace

D2Solution solve_d2(double delta) {
    require_delta(delta, "solve_d2");
    constexpr int kGrid = 2001;
    const double h = 1.0 / (kGrid - 1);

    D2Solution s;
    std::optional<Candidate> best;
    double best_omega = 0.0;
    for (int j = 1; j < kGrid - 1; ++j) {
        double omega_bar = j * h;
        auto c = best_candidate_at(omega_bar, delta);
        if (c && (!best || c->profit > best->profit)) {
            best = c;
            best_omega = omega_bar;
        }
    }
    if (!best) {
        s.epo_equivalent = true;
        s.profit = delta / 12.0;
        return s;
    }

    // local refinement of omega_bar around the best grid point
    auto objective = [&](double omega_bar) {
        auto c = best_candidate_at(omega_bar, delta);
        return c ? c->profit : -std::numeric_limits<double>::infinity();
    };
    auto refined = num::maximize_1d(objective, std::max(h, best_omega - h),
                                    std::min(1.0 - h, best_omega + h));
    if (refined.value > best->profit) {
        best_omega = refined.argmax;
        best = best_candidate_at(best_omega, delta);
    }

    s.epo_equivalent = false;
    s.omega_bar = best_omega;
    s.theta_bar = best->theta_bar;
    s.high_branch = best->high_branch;
    s.p0 = best->theta_bar -
           delta * best->theta_bar * best->theta_bar / (4.0 * best_omega);
    s.near_degenerate = (best_omega <= 2.0 * h || best_omega >= 1.0 - 2.0 * h);
    s.profit = best->profit;
    return s;
}

D2Solution solve_d2(const Distribution& F, const Distribution& G,
                    double delta) {
    require_uniform(F, G, "solve_d2");
    return solve_d2(delta);
}

}  // namespace mechlab::atwill
