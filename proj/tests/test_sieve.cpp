#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mobius/errors.hpp"
#include "mobius/oracles.hpp"
#include "mobius/sieve.hpp"

using namespace mobius;

namespace {

std::vector<std::uint64_t> drain(PrimeStream s) {
    std::vector<std::uint64_t> out;
    while (auto p = s.next()) out.push_back(*p);
    return out;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("isqrt") {
    CHECK(isqrt(0) == 0);
    CHECK(isqrt(15) == 3);
    CHECK(isqrt(16) == 4);
    CHECK(isqrt(kMaxSieveLimit) == (std::uint64_t{1} << 31));
    CHECK(isqrt(~std::uint64_t{0}) == 4294967295ULL);
}

TEST_CASE("enumerate_primes small cases") {
    CHECK(drain(enumerate_primes(10)) == std::vector<std::uint64_t>{2, 3, 5, 7});
    CHECK(drain(enumerate_primes(1)).empty());
    CHECK(drain(enumerate_primes(0)).empty());
    const auto p30 = drain(enumerate_primes(30));
    CHECK(p30.size() == 10);
    CHECK(p30.back() == 29);
}

TEST_CASE("prime stream agrees with trial division and restarts") {
    const std::uint64_t limit = 20000;
    PrimeStream s(limit, 2, 97);  // odd segment length exercises boundaries
    const auto a = drain(s);
    std::vector<std::uint64_t> expect;
    for (std::uint64_t n = 2; n <= limit; ++n)
        if (is_prime(n)) expect.push_back(n);
    CHECK(a == expect);
    s.restart();
    CHECK(drain(s) == expect);

    PrimeStream tail(100, 50);
    CHECK(drain(tail) == std::vector<std::uint64_t>{53, 59, 61, 67, 71, 73, 79, 83, 89, 97});
}

TEST_CASE("sieve_block single values") {
    const auto omega = AdditiveSpec::omega();
    auto one = sieve_block(1, 2, omega);
    CHECK(one.mu[0] == 1);
    CHECK(one.fval[0] == 0);
    CHECK(sieve_block(12, 13, omega).mu[0] == 0);
    CHECK(sieve_block(60, 61, omega).fval[0] == 3);
    CHECK(sieve_block(60, 61, AdditiveSpec::threshold(3)).fval[0] == 1);
}

TEST_CASE("sieve_block [10,20) matches hand factorization") {
    const auto b = sieve_block(10, 20, AdditiveSpec::omega());
    const std::vector<int> expect = {1, -1, 0, -1, 1, 1, 0, -1, 0, -1};
    REQUIRE(b.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(b.mu[i] == expect[i]);
}

TEST_CASE("sieve_block errors") {
    const auto omega = AdditiveSpec::omega();
    CHECK_THROWS_AS(sieve_block(0, 5, omega), ParameterError);
    CHECK_THROWS_AS(sieve_block(5, 5, omega), ParameterError);
    CHECK_THROWS_AS(sieve_block(9, 5, omega), ParameterError);
    CHECK_THROWS_AS(BlockSiever(kMaxSieveLimit + 1, omega), CapacityError);
    BlockSiever s(100, omega);
    CHECK_THROWS_AS(s.sieve_block(90, 102), ParameterError);
}

TEST_CASE("sieve agrees with trial division for every spec") {
    for (const char* text : {"omega", "threshold:3", "residue:4:1:0", "list:2,5,13"}) {
        const auto spec = AdditiveSpec::parse(text);
        const BlockSiever s(5000, spec);
        const auto b = s.sieve_block(1, 5001);
        bool ok = true;
        for (std::uint64_t n = 1; n <= 5000; ++n) {
            const auto o = oracle::factor(n, spec);
            ok = ok && b.mu[n - 1] == o.mu && (o.mu == 0 || b.fval[n - 1] == o.f);
        }
        CHECK_MESSAGE(ok, text);
    }
}

TEST_CASE("large residual prime factors near 2^40") {
    const std::uint64_t lo = (std::uint64_t{1} << 40) - 200;
    const BlockSiever s(lo + 400, AdditiveSpec::omega());
    const auto b = s.sieve_block(lo, lo + 400);
    for (std::uint64_t n = lo; n < lo + 400; n += 37) {
        const auto o = oracle::factor(n, AdditiveSpec::omega());
        CHECK(b.mu[n - lo] == o.mu);
        if (o.mu != 0) CHECK(b.fval[n - lo] == o.f);
    }
}

TEST_CASE("mertens values") {
    CHECK(mertens(1) == 1);
    CHECK(mertens(10) == -1);
    CHECK(mertens(30) == -3);
    CHECK_THROWS_AS(mertens(0), ParameterError);
    for (std::uint64_t x : {10ULL, 100ULL, 1000ULL, 10000ULL}) CHECK(mertens(x) == oracle::mertens(x));
}

TEST_CASE("partition independence: segment size and workers do not change results") {
    const std::uint64_t x = 200000;
    const auto reference = mertens(x);
    for (std::uint64_t seg : {1ULL, 7ULL, 1000ULL, 65536ULL, 1ULL << 22}) {
        if (seg == 1 && x > 50000) continue;
        for (unsigned w : {1u, 3u, 8u}) CHECK(mertens(x, {seg, w}) == reference);
    }
    CHECK(mertens(3000, {1, 2}) == oracle::mertens(3000));
}

TEST_CASE("Mobius convolution sum_{d|n} mu(d) = [n = 1] up to 10^4") {
    const std::uint64_t N = 10000;
    const auto b = sieve_block(1, N + 1, AdditiveSpec::omega());
    std::vector<int> acc(N + 1, 0);
    for (std::uint64_t d = 1; d <= N; ++d)
        for (std::uint64_t n = d; n <= N; n += d) acc[n] += b.mu[d - 1];
    bool ok = acc[1] == 1;
    for (std::uint64_t n = 2; n <= N; ++n) ok = ok && acc[n] == 0;
    CHECK(ok);
}

TEST_CASE("squarefree density approaches 6/pi^2") {
    const std::uint64_t x = 1000000;
    std::int64_t squarefree = 0;
    const BlockSiever s(x, AdditiveSpec::omega());
    auto parts = map_blocks(s, x, {1 << 16, 2}, [](const SievedBlock& b) {
        std::int64_t c = 0;
        for (auto m : b.mu) c += m != 0;
        return c;
    });
    squarefree = std::accumulate(parts.begin(), parts.end(), std::int64_t{0});
    CHECK(squarefree == 607926);
    CHECK(std::fabs(static_cast<double>(squarefree) / x - 6.0 / (M_PI * M_PI)) < 1e-3);
}

TEST_CASE("strong additivity on coprime pairs") {
    const auto spec = AdditiveSpec::threshold(3);
    const auto b = sieve_block(1, 3001, spec);
    bool ok = true;
    for (std::uint64_t m = 1; m <= 54; ++m)
        for (std::uint64_t n = 1; n <= 54; ++n) {
            if (std::gcd(m, n) != 1 || b.mu[m - 1] == 0 || b.mu[n - 1] == 0) continue;
            ok = ok && b.fval[m * n - 1] == b.fval[m - 1] + b.fval[n - 1];
            ok = ok && b.mu[m * n - 1] == b.mu[m - 1] * b.mu[n - 1];
        }
    CHECK(ok);
}

TEST_CASE("map_blocks propagates worker exceptions") {
    const BlockSiever s(10000, AdditiveSpec::omega());
    CHECK_THROWS_AS(map_blocks(s, 10000, {100, 4},
                               [](const SievedBlock& b) -> int {
                                   if (b.lo > 5000) throw std::runtime_error("boom");
                                   return 0;
                               }),
                    std::runtime_error);
}

TEST_CASE("Mertens band |M(x)| <= sqrt(x) on a sampled range") {
    for (std::uint64_t x = 200; x <= 1000000; x = x * 3 + 1) {
        CHECK(std::fabs(static_cast<double>(mertens(x))) <= std::sqrt(static_cast<double>(x)));
    }
}
