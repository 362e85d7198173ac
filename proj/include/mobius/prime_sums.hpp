#pragma once
// Prime harmonic sums attached to an AdditiveSpec:
//   E(x) = sum_{p <= x, f(p) = 1} 1/p      F(x) = sum_{p <= x, f(p) = 0} 1/p
// the Euler-product constant lambda_f, and the growth hypotheses on F.
//
// All sums run over primes in increasing order with compensated
// accumulation, so results do not depend on how the sieve was scheduled.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobius/additive_spec.hpp"

namespace mobius {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Per-prime cache for one (x, spec): p, 1/p, log p and f(p) for every p <= x.
class PrimeTable {
public:
    PrimeTable(std::uint64_t x, AdditiveSpec spec);

    std::uint64_t x() const noexcept { return x_; }
    const AdditiveSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return primes_.size(); }

    std::span<const std::uint64_t> primes() const noexcept { return primes_; }
    std::span<const double> inv_p() const noexcept { return inv_p_; }
    std::span<const double> log_p() const noexcept { return log_p_; }
    std::span<const std::uint8_t> f() const noexcept { return f_; }

    double E() const noexcept { return e_; }
    double F() const noexcept { return f_sum_; }

    // Number of primes <= y.
    std::size_t count_upto(double y) const noexcept;

    // E and F restricted to a < p <= b.
    double E_between(double a, double b) const;
    double F_between(double a, double b) const;

private:
    std::uint64_t x_;
    AdditiveSpec spec_;
    std::vector<std::uint64_t> primes_;
    std::vector<double> inv_p_;
    std::vector<double> log_p_;
    std::vector<std::uint8_t> f_;
    double e_ = 0.0;
    double f_sum_ = 0.0;
};

double prime_sum_E(std::uint64_t x, const AdditiveSpec& spec);
double prime_sum_F(std::uint64_t x, const AdditiveSpec& spec);

struct LedgerCheckpoint {
    std::uint64_t x;
    double E;
    double F;
};

struct PrimeSumLedger {
    std::string spec_id;
    std::vector<LedgerCheckpoint> checkpoints;  // ascending x
};

// Powers of two from 2^10 up to limit, merged with `extra` and limit itself.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t limit, std::span<const std::uint64_t> extra = {});

PrimeSumLedger build_ledger(const AdditiveSpec& spec, std::span<const std::uint64_t> points);

// Continues `base` from its last checkpoint below points.front(); new
// checkpoints beyond it are summed from there instead of from 2.
PrimeSumLedger extend_ledger(const PrimeSumLedger& base, const AdditiveSpec& spec,
                             std::span<const std::uint64_t> points);

struct LambdaF {
    double value = 1.0;        // partial product over f(p) = 0, p <= cutoff
    double tail_bound = 0.0;   // bound on |log(remaining factors)|
    bool divergent = false;
    std::uint64_t cutoff = 0;
};

// prod_{f(p)=0, p<=cutoff} (1 - 1/p)/(1 + 1/p) * e^{2/p}. The tail bound uses
// |log factor| <= 1/p^2 and sum_{p > cutoff} 1/p^2 < 1/cutoff; it is zero
// when no prime beyond the cutoff has f(p) = 0.
LambdaF lambda_f(const AdditiveSpec& spec, std::uint64_t cutoff);

struct HypothesisCeilings {
    std::optional<double> f_over_log3;      // ceiling for F(x)/log3(x)
    std::optional<double> restricted_sum;   // ceiling for the restricted log-sum
    std::optional<double> sufficient_ratio; // ceiling for the sufficient-condition ratio
};

struct HypothesisReport {
    std::uint64_t x = 0;
    double D = 0.0;
    double c0 = 0.0;
    double F = 0.0;
    double log3x = 0.0;
    double f_over_log3 = 0.0;
    double restricted_cut = 0.0;   // exp{(log x)/(log2 x)^D}
    double restricted_sum = 0.0;   // sum_{cut < p <= x} (1 - f(p)) log p / p
    double sufficient_sum = 0.0;   // sum_{p <= x} (1 - f(p)) log p
    double sufficient_scale = 0.0; // x / (log2 x)^{max(1, c0)}
    double sufficient_ratio = 0.0;
    std::optional<bool> f_over_log3_ok;
    std::optional<bool> restricted_ok;
    std::optional<bool> sufficient_ok;
};

HypothesisReport check_hypotheses(const PrimeTable& table, double D, double c0,
                                  const HypothesisCeilings& ceilings = {});
HypothesisReport check_hypotheses(const AdditiveSpec& spec, std::uint64_t x, double D, double c0,
                                  const HypothesisCeilings& ceilings = {});

// Iterated logarithms log log x and log log log x. DomainError when the
// result is undefined or non-positive (x <= e for loglog, x < 16 for logloglog).
double loglog(double x);
double logloglog(double x);

}  // namespace mobius
