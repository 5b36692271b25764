#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "mechlab/errors.hpp"

// Deterministic bracketed root finding, adaptive Simpson quadrature and
// scan+golden-section maximization. Everything here is pure; no randomness.

namespace mechlab::num {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Bisection with secant acceleration on a sign-changing bracket [a, b].
// Returns x with |f(x)| <= tol (or the bracket collapsed to machine width).
template <class F>
RootResult find_root(F&& f, double a, double b, double tol = 1e-10) {
    double fa = f(a);
    if (std::abs(fa) <= tol) return {a, fa, 0};
    double fb = f(b);
    if (std::abs(fb) <= tol) return {b, fb, 0};
    if ((fa > 0.0) == (fb > 0.0))
        throw numeric_error("find_root: no sign change on bracket");

    double x = a, fx = fa;
    int iter = 0;
    bool last_was_bisect = true;
    double prev_width = b - a;
    while (iter < 200) {
        double width = b - a;
        double cand = 0.5 * (a + b);
        // secant proposal, only if it lands safely inside the bracket and
        // the bracket has been shrinking; otherwise bisect
        if (fb != fa) {
            double s = b - fb * (b - a) / (fb - fa);
            double margin = 0.01 * width;
            bool shrinking = last_was_bisect || width < 0.5 * prev_width;
            if (s > a + margin && s < b - margin && shrinking) cand = s;
        }
        last_was_bisect = (cand == 0.5 * (a + b));
        prev_width = width;
        fx = f(cand);
        x = cand;
        ++iter;
        if (std::abs(fx) <= tol) break;
        if ((fx > 0.0) == (fa > 0.0)) {
            a = cand;
            fa = fx;
        } else {
            b = cand;
            fb = fx;
        }
        if (b - a <= 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(a))) {
            break;
        }
    }
    return {x, fx, iter};
}

struct QuadResult {
    double value = 0.0;
    bool converged = true;  // false when the depth cap cut off refinement
};

namespace detail {

template <class F>
double adaptive_simpson(F& f, double a, double fa, double b, double fb,
                        double m, double fm, double whole, double tol,
                        int depth, bool& converged) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double h = b - a;
    double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (depth <= 0) {
        converged = false;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                            depth - 1, converged) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                            depth - 1, converged);
}

}  // namespace detail

// Adaptive Simpson on [a, b] with recursion depth cap 50.
template <class F>
QuadResult integrate(F&& f, double a, double b, double tol = 1e-9) {
    if (a > b) throw numeric_error("integrate: a > b");
    if (a == b) return {0.0, true};
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    QuadResult r;
    r.value = detail::adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 50,
                                       r.converged);
    return r;
}

struct MaxResult {
    double argmax = 0.0;
    double value = -std::numeric_limits<double>::infinity();
    double grid_resolution = 0.0;
    std::vector<double> ties;  // coarse-scan points sharing the best value
};

// 1025-point uniform scan, then golden-section refinement of the best
// bracket down to width 1e-10. Ties on the scan break toward the smallest
// argmax; the reported value is never below any scanned point.
template <class F>
MaxResult maximize_1d(F&& f, double a, double b) {
    constexpr int kScan = 1025;
    const double h = (b - a) / (kScan - 1);
    MaxResult res;
    res.grid_resolution = h;

    int best_i = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(kScan);
    for (int i = 0; i < kScan; ++i) {
        double x = (i == kScan - 1) ? b : a + i * h;
        vals[i] = f(x);
        if (vals[i] > best_v) {
            best_v = vals[i];
            best_i = i;
        }
    }
    for (int i = 0; i < kScan; ++i)
        if (vals[i] == best_v) res.ties.push_back(a + i * h);

    res.argmax = a + best_i * h;
    res.value = best_v;

    double lo = (best_i > 0) ? a + (best_i - 1) * h : a;
    double hi = (best_i < kScan - 1) ? a + (best_i + 1) * h : b;

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    double fc = f(c), fd = f(d);
    auto note = [&](double x, double v) {
        if (v > res.value) {
            res.value = v;
            res.argmax = x;
        }
    };
    note(c, fc);
    note(d, fd);
    while (hi - lo > 1e-10) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = f(c);
            note(c, fc);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = f(d);
            note(d, fd);
        }
    }
    return res;
}

struct Max2dResult {
    double x = 0.0;
    double y = 0.0;
    double value = -std::numeric_limits<double>::infinity();
    bool feasible = false;
    double grid_resolution = 0.0;
};

// Exhaustive n x n grid over the box, restricted to feasible points,
// followed by a few rounds of coordinate golden-section around the best
// grid point. Infeasible points score -inf during refinement.
template <class F, class C>
Max2dResult maximize_2d_constrained(F&& f, C&& feasible, double x0, double x1,
                                    double y0, double y1, int n) {
    if (n < 2) throw numeric_error("maximize_2d_constrained: n < 2");
    const double hx = (x1 - x0) / (n - 1);
    const double hy = (y1 - y0) / (n - 1);
    Max2dResult res;
    res.grid_resolution = std::max(hx, hy);
    for (int i = 0; i < n; ++i) {
        double x = x0 + i * hx;
        for (int j = 0; j < n; ++j) {
            double y = y0 + j * hy;
            if (!feasible(x, y)) continue;
            double v = f(x, y);
            if (v > res.value) {
                res.value = v;
                res.x = x;
                res.y = y;
                res.feasible = true;
            }
        }
    }
    if (!res.feasible) return res;

    auto safe = [&](double x, double y) {
        return feasible(x, y) ? f(x, y)
                              : -std::numeric_limits<double>::infinity();
    };
    for (int round = 0; round < 3; ++round) {
        double ax = std::max(x0, res.x - hx), bx = std::min(x1, res.x + hx);
        auto mx = maximize_1d([&](double x) { return safe(x, res.y); }, ax, bx);
        if (mx.value > res.value) {
            res.value = mx.value;
            res.x = mx.argmax;
        }
        double ay = std::max(y0, res.y - hy), by = std::min(y1, res.y + hy);
        auto my = maximize_1d([&](double y) { return safe(res.x, y); }, ay, by);
        if (my.value > res.value) {
            res.value = my.value;
            res.y = my.argmax;
        }
    }
    return res;
}

}  // namespace mechlab::num
