#pragma once
// sieve.hpp
// Segmented sieve for mu(n) and f(n), plus a restartable prime stream.
//
// Per block [lo, hi) and every base prime p <= sqrt(hi - 1):
//   multiples of p   flip the mu sign, multiply a running product by p,
//                    and add f(p) to fval;
//   multiples of p^2 zero mu.
// A final pass compares the product with n: a mismatch means exactly one
// prime factor q > sqrt(hi - 1) is left, so mu flips once more and fval
// gains f(q) with q = n / product.
//
// Blocks are independent. map_blocks() farms them out to a worker pool and
// returns per-block results in block order, so reductions over them do not
// depend on scheduling or worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "mobius/additive_spec.hpp"

namespace mobius {

// Largest admissible sieve limit. Keeps every n and every product of its
// small prime factors inside uint64_t with margin.
inline constexpr std::uint64_t kMaxSieveLimit = std::uint64_t{1} << 62;

inline constexpr std::uint64_t kDefaultSegmentSize = std::uint64_t{1} << 22;

std::uint64_t isqrt(std::uint64_t n) noexcept;

// Primes in [lo, limit], ascending, each exactly once. Memory is
// O(sqrt(limit) + segment). restart() rewinds to the first prime.
class PrimeStream {
public:
    explicit PrimeStream(std::uint64_t limit, std::uint64_t lo = 2,
                         std::uint64_t segment_size = std::uint64_t{1} << 18);

    std::optional<std::uint64_t> next();
    void restart();

    std::uint64_t limit() const noexcept { return limit_; }
    std::uint64_t lower() const noexcept { return lo_; }

private:
    bool fill_segment();

    std::uint64_t limit_;
    std::uint64_t lo_;
    std::uint64_t segment_size_;
    std::vector<std::uint64_t> base_;  // primes <= sqrt(limit)
    std::vector<char> composite_;
    std::uint64_t seg_lo_ = 0;         // first integer of the current segment
    std::uint64_t seg_len_ = 0;
    std::uint64_t cursor_ = 0;         // index into composite_
    std::uint64_t next_seg_lo_ = 0;
};

PrimeStream enumerate_primes(std::uint64_t limit);

// All primes <= limit as a vector (convenience over PrimeStream).
std::vector<std::uint64_t> collect_primes(std::uint64_t limit);

struct SievedBlock {
    std::uint64_t lo = 1;
    std::uint64_t hi = 1;
    std::vector<std::int8_t> mu;
    std::vector<std::uint8_t> fval;

    std::size_t size() const noexcept { return static_cast<std::size_t>(hi - lo); }
};

struct SieveOptions {
    std::uint64_t segment_size = kDefaultSegmentSize;
    unsigned workers = 1;
};

// Sieves any block inside [1, limit]. Holds the read-only base prime list
// and its f-flags; safe to share across threads.
class BlockSiever {
public:
    BlockSiever(std::uint64_t limit, AdditiveSpec spec);

    SievedBlock sieve_block(std::uint64_t lo, std::uint64_t hi) const;

    // Same as sieve_block, reusing the caller's buffers.
    void sieve_into(std::uint64_t lo, std::uint64_t hi, SievedBlock& out,
                    std::vector<std::uint64_t>& scratch) const;

    std::uint64_t limit() const noexcept { return limit_; }
    const AdditiveSpec& spec() const noexcept { return spec_; }

private:
    std::uint64_t limit_;
    AdditiveSpec spec_;
    std::vector<std::uint64_t> base_;
    std::vector<std::uint8_t> base_flag_;
};

// One-off block with the global limit set to hi - 1.
SievedBlock sieve_block(std::uint64_t lo, std::uint64_t hi, const AdditiveSpec& spec);

// Applies fn to every block of [1, x] (blocks of options.segment_size) and
// returns the results in block order.
template <class Fn>
auto map_blocks(const BlockSiever& siever, std::uint64_t x, const SieveOptions& options, Fn fn)
    -> std::vector<decltype(fn(std::declval<const SievedBlock&>()))> {
    using Result = decltype(fn(std::declval<const SievedBlock&>()));
    const std::uint64_t seg = std::max<std::uint64_t>(options.segment_size, 1);
    const std::uint64_t nblocks = x == 0 ? 0 : (x + seg - 1) / seg;
    std::vector<Result> results(nblocks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        SievedBlock block;
        std::vector<std::uint64_t> scratch;
        try {
            for (std::uint64_t b = next++; b < nblocks; b = next++) {
                const std::uint64_t lo = 1 + b * seg;
                const std::uint64_t hi = std::min(lo + seg, x + 1);
                siever.sieve_into(lo, hi, block, scratch);
                results[b] = fn(static_cast<const SievedBlock&>(block));
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = nblocks;
        }
    };

    const unsigned nworkers =
        static_cast<unsigned>(std::clamp<std::uint64_t>(options.workers, 1, std::max<std::uint64_t>(nblocks, 1)));
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nworkers);
        for (unsigned i = 0; i < nworkers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

// Sum of mu(n) for n <= x by block reduction.
std::int64_t mertens(std::uint64_t x, const SieveOptions& options = {});

}  // namespace mobius
