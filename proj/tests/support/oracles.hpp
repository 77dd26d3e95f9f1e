#pragma once

// Test-side oracles. These stay independent of the library code paths they
// check: quadrature instead of the closed form, naive loops instead of the
// indexed search, long-double accumulation instead of double.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace testsupport {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double eps, double whole, double fa, double fb, double fm,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, eps / 2.0, left, fa, fm, flm, depth - 1) +
           adaptive_simpson_rec(f, m, b, eps / 2.0, right, fm, fb, frm, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-10) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, eps, whole, fa, fb, fm, 40);
}

// Integrand of the random-line collision probability at distance eta, width w.
inline double collision_integrand(double t, double eta, double w) {
    return 2.0 / (std::sqrt(2.0 * std::numbers::pi) * eta) *
           std::exp(-t * t / (2.0 * eta * eta)) * (1.0 - t / w);
}

inline double collision_prob_quadrature(double eta, double w) {
    return integrate([=](double t) { return collision_integrand(t, eta, w); }, 0.0, w, 1e-9);
}

// Naive per-coordinate re-implementations of the metrics.
inline double naive_l2(const std::vector<double>& p, const std::vector<double>& q) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const long double diff = static_cast<long double>(p[i]) - static_cast<long double>(q[i]);
        acc += diff * diff;
    }
    return static_cast<double>(std::sqrt(acc));
}

inline double naive_l1(const std::vector<double>& p, const std::vector<double>& q) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += std::abs(static_cast<long double>(p[i]) - static_cast<long double>(q[i]));
    }
    return static_cast<double>(acc);
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double stddev(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline int popcount64(std::uint64_t x) {
    int c = 0;
    while (x) {
        x &= x - 1;
        ++c;
    }
    return c;
}

}  // namespace testsupport
