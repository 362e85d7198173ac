#include "mobius/prime_sums.hpp"

#include <algorithm>
#include <cmath>

#include "mobius/errors.hpp"
#include "mobius/sieve.hpp"

namespace mobius {

void CompensatedSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

double loglog(double x) {
    if (!(x > std::exp(1.0))) throw DomainError("log log x requires x > e");
    return std::log(std::log(x));
}

double logloglog(double x) {
    const double l2 = (x > std::exp(1.0)) ? std::log(std::log(x)) : 0.0;
    if (!(l2 > 1.0)) throw DomainError("log log log x requires x >= 16");
    return std::log(l2);
}

// -------------------------------------------------------
// PrimeTable
// -------------------------------------------------------

PrimeTable::PrimeTable(std::uint64_t x, AdditiveSpec spec) : x_(x), spec_(std::move(spec)) {
    PrimeStream stream(x);
    CompensatedSum e, f;
    while (auto p = stream.next()) {
        const double inv = 1.0 / static_cast<double>(*p);
        const auto flag = static_cast<std::uint8_t>(spec_.classify(*p));
        primes_.push_back(*p);
        inv_p_.push_back(inv);
        log_p_.push_back(std::log(static_cast<double>(*p)));
        f_.push_back(flag);
        (flag ? e : f).add(inv);
    }
    e_ = e.value();
    f_sum_ = f.value();
}

std::size_t PrimeTable::count_upto(double y) const noexcept {
    auto it = std::partition_point(primes_.begin(), primes_.end(),
                                   [y](std::uint64_t p) { return static_cast<double>(p) <= y; });
    return static_cast<std::size_t>(it - primes_.begin());
}

double PrimeTable::E_between(double a, double b) const {
    CompensatedSum s;
    for (std::size_t i = count_upto(a), end = count_upto(b); i < end; ++i)
        if (f_[i]) s.add(inv_p_[i]);
    return s.value();
}

double PrimeTable::F_between(double a, double b) const {
    CompensatedSum s;
    for (std::size_t i = count_upto(a), end = count_upto(b); i < end; ++i)
        if (!f_[i]) s.add(inv_p_[i]);
    return s.value();
}

double prime_sum_E(std::uint64_t x, const AdditiveSpec& spec) {
    if (x < 2) throw ParameterError("prime_sum_E: x must be >= 2");
    CompensatedSum s;
    PrimeStream stream(x);
    while (auto p = stream.next())
        if (spec.classify(*p)) s.add(1.0 / static_cast<double>(*p));
    return s.value();
}

double prime_sum_F(std::uint64_t x, const AdditiveSpec& spec) {
    if (x < 2) throw ParameterError("prime_sum_F: x must be >= 2");
    CompensatedSum s;
    PrimeStream stream(x);
    while (auto p = stream.next())
        if (!spec.classify(*p)) s.add(1.0 / static_cast<double>(*p));
    return s.value();
}

// -------------------------------------------------------
// Ledger
// -------------------------------------------------------

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t limit, std::span<const std::uint64_t> extra) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t v = std::uint64_t{1} << 10; v <= limit; v <<= 1) {
        out.push_back(v);
        if (v > (kMaxSieveLimit >> 1)) break;
    }
    for (auto v : extra)
        if (v >= 2 && v <= limit) out.push_back(v);
    if (limit >= 2) out.push_back(limit);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

void accumulate_checkpoints(PrimeSumLedger& ledger, const AdditiveSpec& spec, std::uint64_t start_after,
                            double e0, double f0, std::span<const std::uint64_t> points) {
    if (points.empty()) return;
    if (!std::is_sorted(points.begin(), points.end()))
        throw ParameterError("ledger checkpoints must be ascending");
    CompensatedSum e, f;
    e.add(e0);
    f.add(f0);
    PrimeStream stream(points.back(), start_after + 1);
    auto p = stream.next();
    for (auto point : points) {
        if (point <= start_after) continue;
        while (p && *p <= point) {
            (spec.classify(*p) ? e : f).add(1.0 / static_cast<double>(*p));
            p = stream.next();
        }
        ledger.checkpoints.push_back({point, e.value(), f.value()});
    }
}

}  // namespace

PrimeSumLedger build_ledger(const AdditiveSpec& spec, std::span<const std::uint64_t> points) {
    PrimeSumLedger ledger{spec.id(), {}};
    accumulate_checkpoints(ledger, spec, 1, 0.0, 0.0, points);
    return ledger;
}

PrimeSumLedger extend_ledger(const PrimeSumLedger& base, const AdditiveSpec& spec,
                             std::span<const std::uint64_t> points) {
    if (base.spec_id != spec.id())
        throw ParameterError("extend_ledger: ledger was built for '" + base.spec_id + "', not '" + spec.id() + "'");
    PrimeSumLedger ledger{spec.id(), {}};
    std::uint64_t start = 1;
    double e0 = 0.0, f0 = 0.0;
    const std::uint64_t first = points.empty() ? 0 : points.front();
    for (const auto& cp : base.checkpoints) {
        if (cp.x > first && !points.empty()) break;
        ledger.checkpoints.push_back(cp);
        start = cp.x;
        e0 = cp.E;
        f0 = cp.F;
    }
    accumulate_checkpoints(ledger, spec, start, e0, f0, points);
    return ledger;
}

// -------------------------------------------------------
// lambda_f
// -------------------------------------------------------

LambdaF lambda_f(const AdditiveSpec& spec, std::uint64_t cutoff) {
    if (cutoff < 2) throw ParameterError("lambda_f: cutoff must be >= 2");
    LambdaF out;
    out.cutoff = cutoff;
    CompensatedSum log_value;
    if (!spec.is_all_ones()) {
        PrimeStream stream(cutoff);
        while (auto p = stream.next()) {
            if (spec.classify(*p)) continue;
            const double u = 1.0 / static_cast<double>(*p);
            log_value.add(std::log1p(-u) - std::log1p(u) + 2.0 * u);
        }
    }
    out.value = std::exp(log_value.value());
    const auto bound = spec.zero_set_bound();
    out.tail_bound = (bound && *bound <= cutoff) ? 0.0 : 1.0 / static_cast<double>(cutoff);
    return out;
}

// -------------------------------------------------------
// Hypotheses on F
// -------------------------------------------------------

HypothesisReport check_hypotheses(const PrimeTable& table, double D, double c0,
                                  const HypothesisCeilings& ceilings) {
    if (!(D > 0.0) || !(c0 > 0.0)) throw ParameterError("check_hypotheses: D and c0 must be positive");
    const double x = static_cast<double>(table.x());
    HypothesisReport r;
    r.x = table.x();
    r.D = D;
    r.c0 = c0;
    r.log3x = logloglog(x);
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    r.F = table.F();
    r.f_over_log3 = r.F / r.log3x;
    r.restricted_cut = std::exp(l1 / std::pow(l2, D));

    CompensatedSum restricted, sufficient;
    const auto primes = table.primes();
    const auto logs = table.log_p();
    const auto inv = table.inv_p();
    const auto f = table.f();
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (f[i]) continue;
        sufficient.add(logs[i]);
        if (static_cast<double>(primes[i]) > r.restricted_cut) restricted.add(logs[i] * inv[i]);
    }
    r.restricted_sum = restricted.value();
    r.sufficient_sum = sufficient.value();
    r.sufficient_scale = x / std::pow(l2, std::max(1.0, c0));
    r.sufficient_ratio = r.sufficient_sum / r.sufficient_scale;

    if (ceilings.f_over_log3) r.f_over_log3_ok = r.f_over_log3 <= *ceilings.f_over_log3;
    if (ceilings.restricted_sum) r.restricted_ok = r.restricted_sum <= *ceilings.restricted_sum;
    if (ceilings.sufficient_ratio) r.sufficient_ok = r.sufficient_ratio <= *ceilings.sufficient_ratio;
    return r;
}

HypothesisReport check_hypotheses(const AdditiveSpec& spec, std::uint64_t x, double D, double c0,
                                  const HypothesisCeilings& ceilings) {
    if (x < 16) throw DomainError("check_hypotheses: x must be >= 16 for log3 x");
    return check_hypotheses(PrimeTable(x, spec), D, c0, ceilings);
}

}  // namespace mobius
