#include "mobius/halasz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include "mobius/errors.hpp"
#include "mobius/format.hpp"
#include "mobius/predictions.hpp"

namespace mobius {

namespace {

constexpr double kPi = std::numbers::pi;

double log_add_exp(double a, double b) {
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

double reduce_theta(double theta) noexcept {
    double r = theta - std::floor(theta);  // [0, 1)
    if (r > 0.5) r -= 1.0;
    return r;
}

double h_theta(double theta, double t) noexcept {
    return 1.0 + std::min(std::cos(t), std::cos(2.0 * kPi * theta - t));
}

double s_theta(double theta) noexcept {
    return 1.0 - (2.0 / kPi) * std::fabs(std::sin(kPi * reduce_theta(theta)));
}

double distance_sum(const PrimeTable& table, double theta, double tau) {
    CompensatedSum s;
    const auto inv = table.inv_p();
    const auto logs = table.log_p();
    const auto f = table.f();
    const double phase = 2.0 * kPi * theta;
    for (std::size_t i = 0; i < inv.size(); ++i)
        s.add((1.0 + std::cos(phase * f[i] - tau * logs[i])) * inv[i]);
    return s.value();
}

// -------------------------------------------------------
// TauProfile
// -------------------------------------------------------

TauProfile::TauProfile(const PrimeTable& table, double T, const TauGridPolicy& policy)
    : table_(&table), T_(T), policy_(policy) {
    if (!(T >= 1.0)) throw ParameterError("tau grid: T must be >= 1");
    if (policy.dense_points > 0) {
        const std::size_t n = policy.dense_points;
        if (n == 1) {
            taus_.push_back(0.0);
        } else {
            for (std::size_t k = 0; k < n; ++k)
                taus_.push_back(-T + 2.0 * T * static_cast<double>(k) / static_cast<double>(n - 1));
        }
    } else {
        if (!(policy.step_factor > 0.0)) throw ParameterError("tau grid: step factor must be positive");
        const double logx = std::log(static_cast<double>(std::max<std::uint64_t>(table.x(), 3)));
        const double h = policy.step_factor / logx;
        const auto half = static_cast<long long>(std::floor(T / h));
        if (static_cast<double>(half) * h < T) taus_.push_back(-T);
        for (long long k = -half; k <= half; ++k) taus_.push_back(static_cast<double>(k) * h);
        if (static_cast<double>(half) * h < T) taus_.push_back(T);
    }
    if (taus_.empty()) throw ParameterError("tau grid is empty");

    const auto inv = table.inv_p();
    const auto logs = table.log_p();
    const auto f = table.f();
    c1_.resize(taus_.size());
    s1_.resize(taus_.size());
    c0_.resize(taus_.size());
    for (std::size_t k = 0; k < taus_.size(); ++k) {
        const double tau = taus_[k];
        CompensatedSum c1, s1, c0;
        for (std::size_t i = 0; i < inv.size(); ++i) {
            const double a = tau * logs[i];
            if (f[i]) {
                c1.add(std::cos(a) * inv[i]);
                s1.add(std::sin(a) * inv[i]);
            } else {
                c0.add(std::cos(a) * inv[i]);
            }
        }
        c1_[k] = c1.value();
        s1_[k] = s1.value();
        c0_[k] = c0.value();
    }
}

double TauProfile::grid_value(double theta, std::size_t k) const noexcept {
    const double phase = 2.0 * kPi * theta;
    return table_->E() + table_->F() + c0_[k] + std::cos(phase) * c1_[k] + std::sin(phase) * s1_[k];
}

double TauProfile::evaluate(double theta, double tau) const { return distance_sum(*table_, theta, tau); }

const char* to_string(TauCase c) noexcept {
    switch (c) {
        case TauCase::large_tau: return "large_tau";
        case TauCase::mid_tau: return "mid_tau";
        case TauCase::small_tau: return "small_tau";
    }
    return "?";
}

// -------------------------------------------------------
// m(x; theta, T)
// -------------------------------------------------------

BoundAudit little_m(const TauProfile& profile, double theta) {
    const auto& table = profile.table();
    const auto taus = profile.taus();

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) ranked.emplace_back(profile.grid_value(theta, k), k);

    const std::size_t top = profile.policy().dense_points > 0
                                ? 1
                                : std::min<std::size_t>(std::max(profile.policy().refine_top, 1), ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top), ranked.end());

    double best = ranked.front().first;
    double best_tau = taus[ranked.front().second];

    if (profile.policy().dense_points == 0) {
        const double logx = std::log(static_cast<double>(std::max<std::uint64_t>(table.x(), 3)));
        const double h = profile.policy().step_factor / logx;
        const double width = profile.policy().refine_width;
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (std::size_t r = 0; r < top; ++r) {
            const double centre = taus[ranked[r].second];
            double a = std::max(-profile.T(), centre - h);
            double b = std::min(profile.T(), centre + h);
            double c = b - inv_phi * (b - a);
            double d = a + inv_phi * (b - a);
            double fc = profile.evaluate(theta, c);
            double fd = profile.evaluate(theta, d);
            while (b - a > width) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = profile.evaluate(theta, c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = profile.evaluate(theta, d);
                }
            }
            const double tau = fc < fd ? c : d;
            const double val = std::min(fc, fd);
            if (val < best) {
                best = val;
                best_tau = tau;
            }
        }
    }

    BoundAudit row;
    row.x = table.x();
    row.spec_id = table.spec().id();
    row.theta = theta;
    row.T = profile.T();
    row.computed_m = std::max(best, 0.0);
    row.argmin_tau = best_tau;
    const auto lb = lower_bound_23(table.E(), table.F(), theta);
    row.lower_bound_23 = lb.sharp;
    row.relaxed_bound = lb.relaxed;
    row.slack = row.computed_m - lb.sharp;
    row.log_v = v_cut(table, theta).log_v;
    const double at = std::fabs(best_tau);
    if (at >= 1.0)
        row.case_tag = TauCase::large_tau;
    else if (row.log_v > 0.0 && at > 1.0 / row.log_v)
        row.case_tag = TauCase::mid_tau;
    else
        row.case_tag = TauCase::small_tau;
    return row;
}

BoundAudit little_m(const PrimeTable& table, double theta, double T, const TauGridPolicy& policy) {
    return little_m(TauProfile(table, T, policy), theta);
}

std::vector<BoundAudit> audit_theta_grid(const TauProfile& profile, std::span<const double> thetas,
                                         unsigned workers) {
    std::vector<BoundAudit> rows(thetas.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < thetas.size(); i = next++) rows[i] = little_m(profile, thetas[i]);
    };
    const unsigned n = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(thetas.size(), 1)));
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    }
    return rows;
}

std::vector<double> theta_grid(std::size_t steps) {
    if (steps == 0) return {0.0};
    std::vector<double> out;
    out.reserve(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j)
        out.push_back(-0.5 + static_cast<double>(j) / static_cast<double>(steps));
    return out;
}

void write_audit_csv(std::ostream& out, std::span<const BoundAudit> rows) {
    out << "x,spec,theta,T,computed_m,argmin_tau,lower_bound_23,relaxed_bound,slack,log_v,case\n";
    for (const auto& r : rows) {
        out << r.x << ',' << csv_field(r.spec_id) << ',' << format_number(r.theta) << ','
            << format_number(r.T) << ',' << format_number(r.computed_m) << ','
            << format_number(r.argmin_tau) << ',' << format_number(r.lower_bound_23) << ','
            << format_number(r.relaxed_bound) << ',' << format_number(r.slack) << ','
            << format_number(r.log_v) << ',' << to_string(r.case_tag) << '\n';
    }
}

// -------------------------------------------------------
// Cut points and closed-form bounds
// -------------------------------------------------------

TailSum tail_sum_h(const PrimeTable& table, double w, double theta, double tau) {
    const double x = static_cast<double>(table.x());
    if (!(w >= 2.0 && w <= x)) throw ParameterError("tail_sum_h: need 2 <= w <= x");
    CompensatedSum s;
    const auto inv = table.inv_p();
    const auto logs = table.log_p();
    for (std::size_t i = table.count_upto(w); i < inv.size(); ++i) s.add(h_theta(theta, tau * logs[i]) * inv[i]);
    TailSum out;
    out.exact = s.value();
    out.reference = s_theta(theta) * std::log(std::log(x) / std::log(w));
    return out;
}

VCut v_cut(double x, double E, double F, double theta) {
    if (!(x >= 3.0)) throw ParameterError("v_cut: x must be >= 3");
    const double c = std::cos(kPi * theta);
    const double s = s_theta(theta);
    VCut out;
    out.log_v = std::log(x) * std::exp(-(2.0 * c * c * E + 2.0 * F) / (2.0 + s));
    out.v = std::exp(out.log_v);
    out.within_range = out.v >= 2.0 && out.v <= x;
    return out;
}

VCut v_cut(const PrimeTable& table, double theta) {
    return v_cut(static_cast<double>(table.x()), table.E(), table.F(), theta);
}

LowerBound23 lower_bound_23(double E, double F, double theta) {
    const double s = s_theta(theta);
    const double cs = std::cos(kPi * theta);
    const double c2 = cs * cs;
    const double c = concentration_constant();
    LowerBound23 out;
    out.sharp = (2.0 * s * c2 / (2.0 + s)) * E + (2.0 * s / (2.0 + s)) * F;
    out.relaxed = c * c2 * E + c * F;
    return out;
}

double beta0(double b_frak, double A) {
    if (!(A > 0.0)) throw ParameterError("beta0: A must be positive");
    const double u = 2.0 * kPi * b_frak / A;
    if (std::fabs(u) < 1e-8) return u * u / 6.0;
    return 1.0 - std::sin(u) / u;
}

double bound21_eval(double x, double T, double m_value) {
    if (!(T >= 1.0)) throw ParameterError("bound21_eval: T must be >= 1");
    if (m_value < 0.0) throw ParameterError("bound21_eval: m must be >= 0");
    return x * (1.0 + m_value) * std::exp(-m_value) + x / T;
}

Thm11Envelope thm11_envelope(const PrimeTable& table, std::size_t points) {
    if (points < 2) throw ParameterError("thm11_envelope: need at least 2 points");
    const double x = static_cast<double>(table.x());
    const double T = std::log(x);
    const double step = 1.0 / static_cast<double>(points - 1);
    CompensatedSum acc;
    for (std::size_t j = 0; j < points; ++j) {
        const double theta = -0.5 + static_cast<double>(j) * step;
        const double m = lower_bound_23(table.E(), table.F(), theta).relaxed;
        const double w = (j == 0 || j + 1 == points) ? 0.5 : 1.0;
        acc.add(w * bound21_eval(x, T, m));
    }
    Thm11Envelope out;
    out.integral = acc.value() * step;
    out.closed_form = thm11_bound(x, table.E(), table.F());
    out.ratio = out.integral / out.closed_form;
    return out;
}

// -------------------------------------------------------
// Parameters
// -------------------------------------------------------

DerivedParams derive_params(const HalaszParams& p, double x) {
    if (!(p.kappa > 0.0 && p.kappa < 1.0)) throw ParameterError("kappa must lie in (0, 1)");
    if (!(p.c0 > 0.0)) throw ParameterError("c0 must be positive");
    if (!(p.K > 0.0)) throw ParameterError("K must be positive");
    if (!(p.B > 0.0)) throw ParameterError("B must be positive");
    DerivedParams d;
    d.kappa = p.kappa;
    d.c0 = p.c0;
    d.K = p.K;
    d.A = p.A.value_or(2.0 / p.kappa);
    d.B = p.B;
    d.b_frak = p.kappa / 4.0;
    d.h_frak = (1.0 - d.b_frak) / d.b_frak;
    d.c_frak_kappa_b = p.kappa * d.b_frak;
    d.c_frak_b_over_A = d.b_frak / d.A;
    d.beta = beta0(d.b_frak, d.A);
    d.delta = p.delta.value_or(std::min(d.beta * d.b_frak / 3.0, 0.1));
    if (!(d.delta > 0.0)) throw ParameterError("delta must be positive");
    d.a_frak = std::min(d.delta, 0.25);
    d.delta_in_window = d.a_frak <= d.delta && d.delta <= d.beta * d.b_frak / 3.0 + 1e-15 &&
                        d.a_frak <= d.b_frak;
    d.A_admissible = d.A >= 2.0 * d.b_frak;
    d.b_exponent = error_exponent_b(p.kappa, p.c0);
    d.theta0 = p.K * std::sqrt(logloglog(x) / loglog(x));
    d.theta0_reported = std::min(d.theta0, 0.5);
    d.small_theta_covers_all = d.theta0 >= 0.5;
    d.K_min = 1.0 / std::sqrt(4.0 * p.kappa * concentration_constant());
    d.K_ok = p.K > d.K_min;
    return d;
}

double log_epsilon(const DerivedParams& d, double theta, double x) {
    const double at = std::fabs(theta);
    const double first = at > 0.0 ? (2.0 / d.delta) * std::log(at) : -INFINITY;
    const double second = -(d.c0 / (d.h_frak * d.delta)) * std::log(loglog(x));
    return log_add_exp(first, second);
}

ConditionReport audit_thm13_conditions(const PrimeTable& table, double rho, double theta,
                                       const DerivedParams& params, std::size_t y_points) {
    if (std::fabs(theta) > 0.5) throw ParameterError("audit_thm13_conditions: |theta| must be <= 1/2");
    if (!(rho > 0.0)) throw ParameterError("audit_thm13_conditions: rho must be positive");
    const double x = static_cast<double>(table.x());
    const double logx = std::log(x);

    ConditionReport r;
    r.x = table.x();
    r.spec_id = table.spec().id();
    r.rho = rho;
    r.theta = theta;
    r.c_frak_kappa_b = params.c_frak_kappa_b;
    r.c_frak_b_over_A = params.c_frak_b_over_A;

    const auto inv = table.inv_p();
    const auto f = table.f();
    const bool any_one = std::find(f.begin(), f.end(), std::uint8_t{1}) != f.end();
    const bool any_zero = std::find(f.begin(), f.end(), std::uint8_t{0}) != f.end();
    r.max_abs_g = std::max(any_one ? rho : 0.0, any_zero ? 1.0 : 0.0);
    r.max_r = r.max_abs_g;
    r.r_prime_power_sum = 0.0;
    r.class_ok = r.max_r <= 2.0 * params.A && r.r_prime_power_sum <= params.B;

    r.log_eps = log_epsilon(params, theta, x);
    r.epsilon = std::exp(r.log_eps);
    r.epsilon_valid = r.log_eps > -0.5 * std::log(logx) && r.log_eps <= -std::log(2.0);

    // r(p) - Re g(p): rho (1 - cos 2 pi theta) when f(p) = 1, 2 when f(p) = 0.
    const double diff1 = rho - rho * std::cos(2.0 * kPi * theta);
    CompensatedSum lhs;
    for (std::size_t i = 0; i < inv.size(); ++i) lhs.add((f[i] ? diff1 : 2.0) * inv[i]);
    r.lhs_12 = lhs.value();
    const double E = table.E();
    const double F = table.F();
    r.closed_form_12 = rho * (1.0 - std::cos(2.0 * kPi * theta)) * E + 2.0 * F;
    r.printed_form_12 = rho * (1.0 - std::cos(2.0 * kPi * theta)) * E + 2.0 * rho * F;
    r.quadratic_bound = 2.0 * kPi * kPi * rho * theta * theta * E + 2.0 * F;
    r.rhs_12 = 0.5 * params.beta * params.b_frak * (-r.log_eps);
    r.margin_12 = r.rhs_12 - r.lhs_12;
    r.pass_12 = r.margin_12 >= 0.0;

    // y grid between x^eps and x, equispaced in log y.
    const double log_lo = r.epsilon * logx;
    const double lo = std::exp(log_lo);
    const std::size_t start = table.count_upto(lo);
    double min14 = INFINITY;
    for (std::size_t k = 1; k <= std::max<std::size_t>(y_points, 1); ++k) {
        const double log_y = log_lo + (logx - log_lo) * static_cast<double>(k) / static_cast<double>(y_points);
        const double y = std::exp(log_y);
        CompensatedSum s13, s14;
        for (std::size_t i = start, end = table.count_upto(y); i < end; ++i) {
            s13.add((f[i] ? diff1 : 2.0) * inv[i]);
            s14.add((f[i] ? rho : 1.0) * inv[i]);
        }
        r.grid_y.push_back(y);
        r.restricted_13.push_back(s13.value());
        r.max_13 = std::max(r.max_13, s13.value());
        const double denom = std::log(log_y) - r.log_eps - std::log(logx);
        if (denom > 0.0) min14 = std::min(min14, s14.value() / denom);
    }
    r.min_14 = std::isfinite(min14) ? min14 : 0.0;
    r.pass_14 = std::isfinite(min14) && min14 >= params.b_frak;
    return r;
}

void write_conditions_csv(std::ostream& out, std::span<const ConditionReport> rows) {
    out << "x,spec,rho,theta,epsilon,log_eps,epsilon_valid,class_ok,lhs_12,closed_form_12,printed_form_12,"
           "quadratic_bound,rhs_12,margin_12,pass_12,max_13,min_14,pass_14,c_frak_kappa_b,c_frak_b_over_A\n";
    for (const auto& r : rows) {
        out << r.x << ',' << csv_field(r.spec_id) << ',' << format_number(r.rho) << ','
            << format_number(r.theta) << ',' << format_number(r.epsilon) << ',' << format_number(r.log_eps)
            << ',' << (r.epsilon_valid ? 1 : 0) << ',' << (r.class_ok ? 1 : 0) << ','
            << format_number(r.lhs_12) << ',' << format_number(r.closed_form_12) << ','
            << format_number(r.printed_form_12) << ',' << format_number(r.quadratic_bound) << ','
            << format_number(r.rhs_12) << ',' << format_number(r.margin_12) << ',' << (r.pass_12 ? 1 : 0)
            << ',' << format_number(r.max_13) << ',' << format_number(r.min_14) << ','
            << (r.pass_14 ? 1 : 0) << ',' << format_number(r.c_frak_kappa_b) << ','
            << format_number(r.c_frak_b_over_A) << '\n';
    }
}

// -------------------------------------------------------
// Mean value of g against r
// -------------------------------------------------------

Bound31Shape bound31_shape(const Dataset& data, double rho, double theta, double kappa) {
    const double x = static_cast<double>(data.x());
    const double c = concentration_constant();
    const double sn = std::sin(kPi * theta);
    Bound31Shape out;
    out.mg_over_mr = std::abs(mean_value_g(data.spectrum, rho, theta)) / mean_value_r(data.spectrum, rho);
    out.shape = std::exp(-c * rho * data.E() * sn * sn - c * rho * data.F()) * loglog(x) +
                std::pow(std::log(x), -kappa);
    out.fitted = out.mg_over_mr / out.shape;
    return out;
}

MainTerm32 main_term_32(const Dataset& data, double rho, double theta) {
    const std::complex<double> z = -rho * std::polar(1.0, 2.0 * kPi * theta);
    const auto inv = data.primes.inv_p();
    const auto f = data.primes.f();
    CompensatedSum log_re, log_im;
    for (std::size_t i = 0; i < inv.size(); ++i) {
        std::complex<double> term;
        if (f[i])
            term = std::log(1.0 - z * inv[i]) - std::log1p(rho * inv[i]);
        else
            term = std::log1p(-inv[i]) - std::log1p(inv[i]);
        log_re.add(term.real());
        log_im.add(term.imag());
    }
    MainTerm32 out;
    out.euler_product = std::exp(std::complex<double>(log_re.value(), log_im.value()));
    const double mr = mean_value_r(data.spectrum, rho);
    out.predicted = mr * out.euler_product;
    out.rewritten = mr * data.lambda.value * std::exp(-(z + rho) * data.E() - 2.0 * data.F());
    out.actual = mean_value_g(data.spectrum, rho, theta);
    out.residual = std::abs(out.actual - out.predicted) / mr;
    return out;
}

}  // namespace mobius
