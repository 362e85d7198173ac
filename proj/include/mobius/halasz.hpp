#pragma once
// The lower-bound pipeline for exponential sums over f, made executable.
//
// m(x; theta, T) = min_{|tau| <= T} sum_{p <= x} (1 + cos(2 pi theta f(p) - tau log p)) / p
//
// is the distance that controls |M(x; theta)|. This module evaluates it
// exactly (grid + golden-section refinement over tau), alongside the
// closed-form lower bounds it is compared with, the cut points used to
// derive them, and the parameter bookkeeping of the mean-value theorem
// applied to g(n) = mu(n) z^{f(n)}. Every O(1) term is turned into a
// measured slack, never assumed.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobius/empirical.hpp"
#include "mobius/prime_sums.hpp"

namespace mobius {

// Reduces theta modulo 1 into [-1/2, 1/2].
double reduce_theta(double theta) noexcept;

// 1 + min{cos t, cos(2 pi theta - t)}.
double h_theta(double theta, double t) noexcept;

// 1 - (2/pi)|sin(pi theta)|, the mean of h_theta over a period.
double s_theta(double theta) noexcept;

// Direct evaluation of sum_{p <= x} (1 + cos(2 pi theta f(p) - tau log p)) / p.
double distance_sum(const PrimeTable& table, double theta, double tau);

struct TauGridPolicy {
    double step_factor = 0.5;    // coarse step = step_factor / log x
    double refine_width = 1e-6;  // golden-section stops below this bracket width
    int refine_top = 3;          // refine around this many best grid points
    std::size_t dense_points = 0;  // > 0: plain uniform grid of this size, no refinement
};

// The tau-dependent prime sums, tabulated once per (x, spec, T):
//   C1(tau) = sum_{f(p)=1} cos(tau log p)/p,  S1(tau) = sum_{f(p)=1} sin(tau log p)/p,
//   C0(tau) = sum_{f(p)=0} cos(tau log p)/p,
// so that the distance sum at any theta is E + F + C0 + cos(2 pi theta) C1 + sin(2 pi theta) S1.
class TauProfile {
public:
    TauProfile(const PrimeTable& table, double T, const TauGridPolicy& policy);

    const PrimeTable& table() const noexcept { return *table_; }
    double T() const noexcept { return T_; }
    const TauGridPolicy& policy() const noexcept { return policy_; }
    std::span<const double> taus() const noexcept { return taus_; }

    double grid_value(double theta, std::size_t k) const noexcept;
    double evaluate(double theta, double tau) const;

private:
    const PrimeTable* table_;
    double T_;
    TauGridPolicy policy_;
    std::vector<double> taus_;
    std::vector<double> c1_, s1_, c0_;
};

enum class TauCase { large_tau, mid_tau, small_tau };

const char* to_string(TauCase c) noexcept;

struct BoundAudit {
    std::uint64_t x = 0;
    std::string spec_id;
    double theta = 0.0;
    double T = 0.0;
    double computed_m = 0.0;
    double argmin_tau = 0.0;
    double lower_bound_23 = 0.0;  // sharp form
    double relaxed_bound = 0.0;   // c cos^2(pi theta) E + c F
    double slack = 0.0;           // computed_m - lower_bound_23
    double log_v = 0.0;
    TauCase case_tag = TauCase::small_tau;
};

BoundAudit little_m(const TauProfile& profile, double theta);
BoundAudit little_m(const PrimeTable& table, double theta, double T, const TauGridPolicy& policy = {});

// Audits over a theta grid, `workers` threads; row order follows `thetas`.
std::vector<BoundAudit> audit_theta_grid(const TauProfile& profile, std::span<const double> thetas,
                                         unsigned workers = 1);

// Equispaced theta grid j/steps - 1/2 ... for j = 0..steps (steps + 1 points).
std::vector<double> theta_grid(std::size_t steps);

void write_audit_csv(std::ostream& out, std::span<const BoundAudit> rows);

struct TailSum {
    double exact = 0.0;      // sum_{w < p <= x} h_theta(tau log p) / p
    double reference = 0.0;  // s_theta log(log x / log w)
};

TailSum tail_sum_h(const PrimeTable& table, double w, double theta, double tau);

struct VCut {
    double log_v = 0.0;
    double v = 0.0;
    bool within_range = false;  // 2 <= v <= x
};

// log v = (log x) exp{-(2 cos^2(pi theta) E + 2F) / (2 + s_theta)}.
VCut v_cut(double x, double E, double F, double theta);
VCut v_cut(const PrimeTable& table, double theta);

struct LowerBound23 {
    double sharp = 0.0;    // (2 s cos^2 / (2 + s)) E + (2 s / (2 + s)) F
    double relaxed = 0.0;  // c cos^2(pi theta) E + c F
};

LowerBound23 lower_bound_23(double E, double F, double theta);

// 1 - sin(u)/u with u = 2 pi b / A; 0 at u = 0.
double beta0(double b_frak, double A);

// x (1 + m) e^{-m} + x / T.
double bound21_eval(double x, double T, double m_value);

struct Thm11Envelope {
    double integral = 0.0;     // int_{-1/2}^{1/2} bound21(x, log x, relaxed(theta)) dtheta
    double closed_form = 0.0;  // thm11_bound(x, E, F)
    double ratio = 0.0;        // integral / closed_form, the fitted constant
};

// Trapezoidal rule on `points` equispaced theta values.
Thm11Envelope thm11_envelope(const PrimeTable& table, std::size_t points = 2001);

// -------------------------------------------------------
// Mean-value theorem bookkeeping for g(n) = mu(n) z^{f(n)}, z = -rho e^{2 pi i theta}
// -------------------------------------------------------

struct HalaszParams {
    double kappa = 0.5;
    double c0 = 1.0;
    double D = 2.0;
    double K = 2.0;
    std::optional<double> A;      // default 2 / kappa
    double B = 1.0;
    std::optional<double> delta;  // default min(beta b / 3, 0.1)
};

struct DerivedParams {
    double kappa = 0.0;
    double A = 0.0;
    double B = 0.0;
    double b_frak = 0.0;        // kappa / 4
    double h_frak = 0.0;        // (1 - b) / b = 4 / kappa - 1
    double c_frak_kappa_b = 0.0;   // kappa b
    double c_frak_b_over_A = 0.0;  // b / A
    double beta = 0.0;          // beta0(b, A)
    double delta = 0.0;
    double a_frak = 0.0;        // taken equal to delta, the smallest admissible window start
    bool delta_in_window = false;  // a <= delta <= beta b / 3
    bool A_admissible = false;     // A >= 2 b
    double b_exponent = 0.0;    // min{1, c0 kappa/(4 - kappa)} / 2
    double theta0 = 0.0;        // K sqrt(log3 x / log2 x)
    double theta0_reported = 0.0;  // theta0 clamped to 1/2
    bool small_theta_covers_all = false;  // theta0 >= 1/2
    double K = 0.0;
    double K_min = 0.0;         // 1 / sqrt(4 kappa c)
    bool K_ok = false;
    double c0 = 0.0;
};

DerivedParams derive_params(const HalaszParams& params, double x);

// log of epsilon = |theta|^{2/delta} + (log2 x)^{-c0/(h delta)}.
double log_epsilon(const DerivedParams& d, double theta, double x);

struct ConditionReport {
    std::uint64_t x = 0;
    std::string spec_id;
    double rho = 0.0;
    double theta = 0.0;

    // class membership of r (and |g| <= r)
    double max_abs_g = 0.0;
    double max_r = 0.0;
    double r_prime_power_sum = 0.0;  // squarefree support: exactly 0
    bool class_ok = false;

    double epsilon = 0.0;
    double log_eps = 0.0;
    bool epsilon_valid = false;  // 1/sqrt(log x) < epsilon <= 1/2

    double lhs_12 = 0.0;           // direct sum_{p<=x} (r(p) - Re g(p)) / p
    double closed_form_12 = 0.0;   // rho (1 - cos 2 pi theta) E + 2F
    double printed_form_12 = 0.0;  // rho (1 - cos 2 pi theta) E + 2 rho F
    double quadratic_bound = 0.0;  // 2 pi^2 rho theta^2 E + 2F
    double rhs_12 = 0.0;           // beta b log(1/epsilon) / 2
    double margin_12 = 0.0;        // rhs - lhs
    bool pass_12 = false;

    // sum_{x^eps < p <= y} (r(p) - Re g(p)) / p on a y grid; reported only
    std::vector<double> grid_y;
    std::vector<double> restricted_13;
    double max_13 = 0.0;

    // min over the y grid of sum_{x^eps < p <= y} r(p)/p / log(log y / (eps log x))
    double min_14 = 0.0;
    bool pass_14 = false;

    double c_frak_kappa_b = 0.0;
    double c_frak_b_over_A = 0.0;
};

ConditionReport audit_thm13_conditions(const PrimeTable& table, double rho, double theta,
                                       const DerivedParams& params, std::size_t y_points = 16);

void write_conditions_csv(std::ostream& out, std::span<const ConditionReport> rows);

struct Bound31Shape {
    double mg_over_mr = 0.0;  // |M(x; g)| / M(x; r)
    double shape = 0.0;       // e^{-c rho E sin^2(pi theta) - c rho F} log2 x + (log x)^{-kappa}
    double fitted = 0.0;      // mg_over_mr / shape
};

Bound31Shape bound31_shape(const Dataset& data, double rho, double theta, double kappa);

struct MainTerm32 {
    std::complex<double> euler_product;  // prod_{f=1}(1 - z/p)/(1 + rho/p) prod_{f=0}(1 - 1/p)/(1 + 1/p)
    std::complex<double> predicted;      // M(x; r) * euler_product
    std::complex<double> rewritten;      // M(x; r) lambda_f e^{-(z + rho) E - 2F}
    std::complex<double> actual;         // M(x; g)
    double residual = 0.0;               // |actual - predicted| / M(x; r)
};

MainTerm32 main_term_32(const Dataset& data, double rho, double theta);

}  // namespace mobius
