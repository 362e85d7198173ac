#pragma once
// Independent reference computations used only for verification. Nothing
// here touches the sieve: factorizations are by trial division and
// integrals by adaptive quadrature.

#include <cstdint>
#include <vector>

#include "mobius/additive_spec.hpp"

namespace mobius::oracle {

struct Factorization {
    int mu = 1;
    int f = 0;  // sum of f(p) over distinct p | n
};

Factorization factor(std::uint64_t n, const AdditiveSpec& spec);

std::int64_t mertens(std::uint64_t x);

struct Spectrum {
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> signed_sums;
};

Spectrum spectrum(std::uint64_t x, const AdditiveSpec& spec);

// (1 / 2 pi) * integral over [-pi, pi] of 1 + min{cos t, cos(2 pi theta - t)},
// by adaptive Simpson on the smooth pieces between the kinks.
double mean_h(double theta, double tol = 1e-14);

}  // namespace mobius::oracle
