#include "mobius/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace mobius::oracle {

Factorization factor(std::uint64_t n, const AdditiveSpec& spec) {
    Factorization out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d != 0) continue;
        n /= d;
        if (n % d == 0) out.mu = 0;
        while (n % d == 0) n /= d;
        out.mu = -out.mu;
        out.f += spec.classify(d);
    }
    if (n > 1) {
        out.mu = -out.mu;
        out.f += spec.classify(n);
    }
    return out;
}

std::int64_t mertens(std::uint64_t x) {
    std::int64_t s = 0;
    for (std::uint64_t n = 1; n <= x; ++n) s += factor(n, AdditiveSpec::omega()).mu;
    return s;
}

Spectrum spectrum(std::uint64_t x, const AdditiveSpec& spec) {
    Spectrum out;
    for (std::uint64_t n = 1; n <= x; ++n) {
        const auto fz = factor(n, spec);
        if (fz.mu == 0) continue;
        const auto m = static_cast<std::size_t>(fz.f);
        if (out.counts.size() <= m) {
            out.counts.resize(m + 1, 0);
            out.signed_sums.resize(m + 1, 0);
        }
        out.counts[m] += 1;
        out.signed_sums[m] += fz.mu;
    }
    return out;
}

namespace {

double simpson(const std::function<double(double)>& g, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& g, double a, double b, double tol) {
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(g, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace

double mean_h(double theta, double tol) {
    constexpr double pi = std::numbers::pi;
    auto h = [theta](double t) { return 1.0 + std::min(std::cos(t), std::cos(2.0 * pi * theta - t)); };
    // Kinks where cos t = cos(2 pi theta - t), i.e. t = pi theta (mod pi).
    std::vector<double> cuts{-pi, pi};
    for (int k = -3; k <= 3; ++k) {
        const double t = pi * theta + k * pi;
        if (t > -pi && t < pi) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) total += integrate(h, cuts[i], cuts[i + 1], tol);
    return total / (2.0 * pi);
}

}  // namespace mobius::oracle
