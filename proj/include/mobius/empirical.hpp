#pragma once
// Exact spectra of f over squarefree n <= x and everything derived from them.
//
// One sieve pass produces the integer histograms
//   counts[m] = N_m(x; f)      = #{n <= x squarefree : f(n) = m}
//   signed[m] = N_m(x; f, mu)  = sum_{n <= x, f(n) = m} mu(n)
// Every theta-dependent quantity (M(x; theta), M(x; g), M(x; r)) is a finite
// trigonometric polynomial in these coefficients, so no re-sieving happens
// per theta.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobius/additive_spec.hpp"
#include "mobius/prime_sums.hpp"
#include "mobius/sieve.hpp"

namespace mobius {

struct SpectrumReport {
    std::uint64_t x = 0;
    std::string spec_id;
    std::vector<std::int64_t> counts;       // dense in m = 0 .. degree()-1
    std::vector<std::int64_t> signed_sums;
    std::int64_t q_plain = 0;               // max_m counts[m]
    std::int64_t q_mobius = 0;              // max_m |signed[m]|

    std::size_t degree() const noexcept { return counts.size(); }
    std::int64_t squarefree() const noexcept;
    std::int64_t mertens() const noexcept;
};

SpectrumReport spectrum(std::uint64_t x, const AdditiveSpec& spec, const SieveOptions& options = {});

// Spectra at several ascending x from a single sieve pass up to xs.back().
std::vector<SpectrumReport> spectra(std::span<const std::uint64_t> xs, const AdditiveSpec& spec,
                                    const SieveOptions& options = {});

struct FourierSample {
    double theta;
    std::complex<double> value;
};

// M(x; theta) = sum_{n <= x} mu(n) e^{2 pi i theta f(n)}.
std::complex<double> exp_sum_M(const SpectrumReport& report, double theta);

std::vector<FourierSample> sample_exp_sum(const SpectrumReport& report, std::span<const double> thetas);

// M(x; g) for g(n) = mu(n) z^{f(n)}, z = -rho e^{2 pi i theta}. When kappa is
// given, rho must lie in [kappa, 1/kappa].
std::complex<double> mean_value_g(const SpectrumReport& report, double rho, double theta,
                                  std::optional<double> kappa = std::nullopt);

// M(x; r) for r(n) = mu(n)^2 rho^{f(n)}.
double mean_value_r(const SpectrumReport& report, double rho, std::optional<double> kappa = std::nullopt);

enum class ZWhich { g, r, abs_g_minus_g, r_minus_g };

// Z(x; h) = sum_{p <= x} h(p)/p for the prime values of g, r and their
// differences. On primes: g(p) = rho e^{2 pi i theta} if f(p) = 1, -1 if
// f(p) = 0; r(p) = |g(p)|.
std::complex<double> z_sum(const PrimeTable& table, double rho, double theta, ZWhich which);

// Recovers N_m(x; f, mu) for every m from D = degree() samples of M(x; g) on
// the circle |z| = rho by an exact inverse DFT.
std::vector<double> fourier_extract(const SpectrumReport& report, double rho);

// CSV: header "x,m,count,signed", one row per m.
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);

// Everything computed once per (x, spec).
struct Dataset {
    SpectrumReport spectrum;
    PrimeTable primes;
    LambdaF lambda;

    Dataset(SpectrumReport s, PrimeTable p, LambdaF l)
        : spectrum(std::move(s)), primes(std::move(p)), lambda(l) {}

    std::uint64_t x() const noexcept { return spectrum.x; }
    double E() const noexcept { return primes.E(); }
    double F() const noexcept { return primes.F(); }
};

Dataset load_dataset(std::uint64_t x, const AdditiveSpec& spec, const SieveOptions& options = {});

}  // namespace mobius
