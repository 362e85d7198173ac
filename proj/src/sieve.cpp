#include "mobius/sieve.hpp"

#include <cmath>
#include <string>

#include "mobius/errors.hpp"

namespace mobius {

std::uint64_t isqrt(std::uint64_t n) noexcept {
    constexpr std::uint64_t kMaxRoot = 0xFFFFFFFFULL;
    auto r = std::min(static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n))), kMaxRoot);
    while (r > 0 && r * r > n) --r;
    while (r < kMaxRoot && (r + 1) * (r + 1) <= n) ++r;
    return r;
}

namespace {

// Plain Eratosthenes up to `limit`, for base primes.
std::vector<std::uint64_t> small_primes(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<char> composite(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    return out;
}

}  // namespace

// -------------------------------------------------------
// PrimeStream
// -------------------------------------------------------

PrimeStream::PrimeStream(std::uint64_t limit, std::uint64_t lo, std::uint64_t segment_size)
    : limit_(limit), lo_(std::max<std::uint64_t>(lo, 2)), segment_size_(std::max<std::uint64_t>(segment_size, 64)) {
    if (limit_ > kMaxSieveLimit)
        throw CapacityError("prime stream limit " + std::to_string(limit_) + " exceeds 2^62");
    base_ = small_primes(isqrt(limit_));
    restart();
}

void PrimeStream::restart() {
    seg_lo_ = lo_;
    seg_len_ = 0;
    cursor_ = 0;
    next_seg_lo_ = lo_;
    composite_.clear();
}

bool PrimeStream::fill_segment() {
    if (next_seg_lo_ > limit_) return false;
    seg_lo_ = next_seg_lo_;
    const std::uint64_t seg_hi = std::min(limit_, seg_lo_ + segment_size_ - 1);  // inclusive
    seg_len_ = seg_hi - seg_lo_ + 1;
    next_seg_lo_ = seg_hi + 1;
    composite_.assign(seg_len_, 0);
    for (auto p : base_) {
        if (p * p > seg_hi) break;
        std::uint64_t start = std::max(p * p, (seg_lo_ + p - 1) / p * p);
        for (std::uint64_t j = start; j <= seg_hi; j += p) composite_[j - seg_lo_] = 1;
    }
    cursor_ = 0;
    return true;
}

std::optional<std::uint64_t> PrimeStream::next() {
    while (true) {
        while (cursor_ < seg_len_) {
            const std::uint64_t idx = cursor_++;
            if (!composite_[idx]) return seg_lo_ + idx;
        }
        if (!fill_segment()) return std::nullopt;
    }
}

PrimeStream enumerate_primes(std::uint64_t limit) { return PrimeStream(limit); }

std::vector<std::uint64_t> collect_primes(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    PrimeStream stream(limit);
    while (auto p = stream.next()) out.push_back(*p);
    return out;
}

// -------------------------------------------------------
// BlockSiever
// -------------------------------------------------------

BlockSiever::BlockSiever(std::uint64_t limit, AdditiveSpec spec)
    : limit_(limit), spec_(std::move(spec)) {
    if (limit_ > kMaxSieveLimit)
        throw CapacityError("sieve limit " + std::to_string(limit_) + " exceeds 2^62");
    base_ = small_primes(isqrt(limit_));
    base_flag_.reserve(base_.size());
    for (auto p : base_) base_flag_.push_back(static_cast<std::uint8_t>(spec_.classify(p)));
}

void BlockSiever::sieve_into(std::uint64_t lo, std::uint64_t hi, SievedBlock& out,
                             std::vector<std::uint64_t>& scratch) const {
    if (lo < 1 || lo >= hi)
        throw ParameterError("sieve_block: need 1 <= lo < hi, got [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + ")");
    if (hi - 1 > limit_)
        throw ParameterError("sieve_block: hi = " + std::to_string(hi) + " exceeds configured limit " +
                             std::to_string(limit_));

    const std::uint64_t len = hi - lo;
    out.lo = lo;
    out.hi = hi;
    out.mu.assign(len, 1);
    out.fval.assign(len, 0);
    scratch.assign(len, 1);

    std::int8_t* mu = out.mu.data();
    std::uint8_t* fval = out.fval.data();
    std::uint64_t* prod = scratch.data();
    const std::uint64_t top = hi - 1;

    for (std::size_t k = 0; k < base_.size(); ++k) {
        const std::uint64_t p = base_[k];
        if (p * p > top) break;
        const std::uint8_t flag = base_flag_[k];
        std::uint64_t first = (lo + p - 1) / p * p;
        for (std::uint64_t j = first - lo; j < len; j += p) {
            mu[j] = static_cast<std::int8_t>(-mu[j]);
            prod[j] *= p;
            fval[j] = static_cast<std::uint8_t>(fval[j] + flag);
        }
        const std::uint64_t p2 = p * p;
        first = (lo + p2 - 1) / p2 * p2;
        for (std::uint64_t j = first - lo; j < len; j += p2) mu[j] = 0;
    }

    // Residual pass: at most one prime factor exceeds sqrt(top).
    const bool all_ones = spec_.is_all_ones();
    for (std::uint64_t j = 0; j < len; ++j) {
        if (mu[j] == 0) continue;
        const std::uint64_t n = lo + j;
        if (prod[j] != n) {
            mu[j] = static_cast<std::int8_t>(-mu[j]);
            const int fq = all_ones ? 1 : spec_.classify(n / prod[j]);
            fval[j] = static_cast<std::uint8_t>(fval[j] + fq);
        }
    }
}

SievedBlock BlockSiever::sieve_block(std::uint64_t lo, std::uint64_t hi) const {
    SievedBlock out;
    std::vector<std::uint64_t> scratch;
    sieve_into(lo, hi, out, scratch);
    return out;
}

SievedBlock sieve_block(std::uint64_t lo, std::uint64_t hi, const AdditiveSpec& spec) {
    if (hi == 0 || hi - 1 > kMaxSieveLimit)
        throw CapacityError("sieve_block: range end " + std::to_string(hi) + " exceeds 2^62");
    return BlockSiever(hi - 1, spec).sieve_block(lo, hi);
}

std::int64_t mertens(std::uint64_t x, const SieveOptions& options) {
    if (x < 1) throw ParameterError("mertens: x must be >= 1");
    BlockSiever siever(x, AdditiveSpec::omega());
    auto partial = map_blocks(siever, x, options, [](const SievedBlock& b) {
        std::int64_t s = 0;
        for (auto m : b.mu) s += m;
        return s;
    });
    std::int64_t total = 0;
    for (auto s : partial) total += s;
    return total;
}

}  // namespace mobius
