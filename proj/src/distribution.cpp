#include "mechlab/distribution.hpp"

#include <algorithm>
#include <cmath>

namespace mechlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error(std::string(what) + ": argument outside [0,1]");
}

}  // namespace

Distribution::Distribution(DistributionSpec spec) : spec_(std::move(spec)) {
    switch (spec_.family) {
        case Family::Uniform:
            mean_ = 0.5;
            break;
        case Family::Power:
            if (!(spec_.k > 0.0))
                throw std::invalid_argument("power family requires k > 0");
            mean_ = spec_.k / (spec_.k + 1.0);
            break;
        case Family::Tabulated: {
            const auto& y = spec_.cdf_grid;
            if (y.size() < 2)
                throw std::invalid_argument(
                    "tabulated cdf needs at least two samples");
            if (std::abs(y.front()) > 1e-12 || std::abs(y.back() - 1.0) > 1e-12)
                throw std::invalid_argument(
                    "tabulated cdf must start at 0 and end at 1");
            for (std::size_t i = 0; i + 1 < y.size(); ++i) {
                if (!(y[i + 1] > y[i]))
                    throw std::invalid_argument(
                        "tabulated cdf must be strictly increasing");
            }
            const std::size_t m = y.size() - 1;
            const double h = 1.0 / static_cast<double>(m);
            slopes_.resize(m);
            gcal_knots_.resize(m + 1);
            gcal_knots_[0] = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                slopes_[i] = (y[i + 1] - y[i]) / h;
                gcal_knots_[i + 1] =
                    gcal_knots_[i] + 0.5 * (y[i] + y[i + 1]) * h;
            }
            mean_ = 1.0 - gcal_knots_[m];
            break;
        }
    }
}

double Distribution::cdf(double x) const {
    require_unit_interval(x, "cdf");
    switch (spec_.family) {
        case Family::Uniform:
            return x;
        case Family::Power:
            return std::pow(x, spec_.k);
        case Family::Tabulated: {
            const auto& y = spec_.cdf_grid;
            const std::size_t m = y.size() - 1;
            if (x >= 1.0) return 1.0;
            double pos = x * static_cast<double>(m);
            auto i = static_cast<std::size_t>(pos);
            if (i >= m) i = m - 1;
            double t = x - static_cast<double>(i) / static_cast<double>(m);
            return y[i] + slopes_[i] * t;
        }
    }
    return 0.0;
}

double Distribution::pdf(double x) const {
    require_unit_interval(x, "pdf");
    switch (spec_.family) {
        case Family::Uniform:
            return 1.0;
        case Family::Power:
            if (x == 0.0) {
                if (spec_.k > 1.0) return 0.0;
                if (spec_.k == 1.0) return 1.0;
                return kInf;
            }
            return spec_.k * std::pow(x, spec_.k - 1.0);
        case Family::Tabulated: {
            const std::size_t m = slopes_.size();
            double pos = x * static_cast<double>(m);
            auto i = static_cast<std::size_t>(pos);
            if (i >= m) return slopes_[m - 1];
            // knots get the midpoint of the adjacent slopes
            if (i > 0 && pos == static_cast<double>(i))
                return 0.5 * (slopes_[i - 1] + slopes_[i]);
            return slopes_[i];
        }
    }
    return 0.0;
}

double Distribution::quantile(double u) const {
    require_unit_interval(u, "quantile");
    switch (spec_.family) {
        case Family::Uniform:
            return u;
        case Family::Power:
            return std::pow(u, 1.0 / spec_.k);
        case Family::Tabulated: {
            const auto& y = spec_.cdf_grid;
            const std::size_t m = y.size() - 1;
            auto it = std::upper_bound(y.begin(), y.end(), u);
            std::size_t i = (it == y.begin())
                                ? 0
                                : static_cast<std::size_t>(it - y.begin()) - 1;
            if (i >= m) i = m - 1;
            return static_cast<double>(i) / static_cast<double>(m) +
                   (u - y[i]) / slopes_[i];
        }
    }
    return 0.0;
}

double Distribution::left_integral(double x) const {
    require_unit_interval(x, "left_integral");
    switch (spec_.family) {
        case Family::Uniform:
            return 0.5 * x * x;
        case Family::Power:
            return std::pow(x, spec_.k + 1.0) / (spec_.k + 1.0);
        case Family::Tabulated: {
            const auto& y = spec_.cdf_grid;
            const std::size_t m = y.size() - 1;
            if (x >= 1.0) return gcal_knots_[m];
            double pos = x * static_cast<double>(m);
            auto i = static_cast<std::size_t>(pos);
            if (i >= m) i = m - 1;
            double t = x - static_cast<double>(i) / static_cast<double>(m);
            return gcal_knots_[i] + y[i] * t + 0.5 * slopes_[i] * t * t;
        }
    }
    return 0.0;
}

double Distribution::truncated_mean_below(double x) const {
    require_unit_interval(x, "truncated_mean_below");
    double c = cdf(x);
    if (c <= 0.0)
        throw std::domain_error(
            "truncated_mean_below: conditional undefined, cdf(x) = 0");
    return x - left_integral(x) / c;
}

double Distribution::virtual_valuation(double theta, double theta_bar) const {
    if (!(theta_bar > 0.0 && theta_bar <= 1.0))
        throw std::domain_error("virtual_valuation: theta_bar outside (0,1]");
    if (!(theta >= 0.0 && theta <= theta_bar))
        throw std::domain_error("virtual_valuation: theta outside [0,theta_bar]");
    double f = pdf(theta);
    if (f == 0.0) {
        if (theta == theta_bar) return theta_bar;
        throw numeric_error("virtual_valuation: density is zero at theta");
    }
    if (std::isinf(f)) return theta;
    return theta - (cdf(theta_bar) - cdf(theta)) / f;
}

double Distribution::virtual_valuation_safe(double theta,
                                            double theta_bar) const {
    double f = pdf(theta);
    if (f == 0.0) return (theta >= theta_bar) ? theta_bar : -kInf;
    if (std::isinf(f)) return theta;
    return theta - (cdf(theta_bar) - cdf(theta)) / f;
}

double Distribution::virtual_cost(double omega) const {
    require_unit_interval(omega, "virtual_cost");
    double g = pdf(omega);
    if (g == 0.0)
        throw numeric_error("virtual_cost: density is zero at omega");
    if (std::isinf(g)) return omega;
    return omega + cdf(omega) / g;
}

Distribution::RegularityReport Distribution::check_regular(int n) const {
    if (n < 2) throw std::invalid_argument("check_regular: n < 2");
    constexpr double kStrictTol = 1e-12;
    RegularityReport rep;
    double prev_theta = 0.0;
    double prev_psi = virtual_valuation_safe(0.0, 1.0);
    for (int i = 1; i < n; ++i) {
        double theta = static_cast<double>(i) / (n - 1);
        double psi = virtual_valuation_safe(theta, 1.0);
        bool ok;
        if (std::isinf(prev_psi) && prev_psi < 0.0)
            ok = !(std::isinf(psi) && psi < 0.0);
        else
            ok = (psi - prev_psi > kStrictTol);
        if (!ok) {
            rep.regular = false;
            rep.violation_lo = prev_theta;
            rep.violation_hi = theta;
            return rep;
        }
        prev_theta = theta;
        prev_psi = psi;
    }
    return rep;
}

bool Distribution::is_uniform() const {
    return spec_.family == Family::Uniform ||
           (spec_.family == Family::Power && spec_.k == 1.0);
}

}  // namespace mechlab
