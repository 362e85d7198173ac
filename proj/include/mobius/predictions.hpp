#pragma once
// Closed-form main terms and bound shapes, each paired with the exact counts
// from a Dataset. Implicit constants of the asymptotic relations are never
// assumed; callers read ratios and treat them as fitted ledger constants.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mobius/empirical.hpp"

namespace mobius {

// c = (2 pi - 4)/(3 pi - 2).
double concentration_constant() noexcept;

// x / sqrt(1 + E).
double halasz_concentration_bound(double x, double E);

// x (1 + F) e^{-c F} / sqrt(1 + E).
double thm11_bound(double x, double E, double F);

// log m! by summing log k, exact up to rounding for the small m used here.
double log_factorial(int m);

// x E^m e^{-E} / m!, evaluated in log space.
double poisson_term(double x, double E, int m);

// b = min{1, c0 kappa / (4 - kappa)} / 2.
double error_exponent_b(double kappa, double c0);

struct Thm12Prediction {
    int m = 0;
    double main = 0.0;          // (-1)^m N_m(x; f) lambda_f e^{-2F(x)}
    double lambda_e2F = 0.0;    // lambda_f e^{-2F(x)}
    double b = 0.0;
    double error_scale = 0.0;   // (log2 x)^{-b}
    bool in_range = false;      // kappa E <= m <= E / kappa
};

// DomainError when E(x) = 0.
Thm12Prediction thm12_prediction(const Dataset& data, int m, double kappa, double c0);

struct NmMainTerm {
    double value = 0.0;        // M(x; r) E^m / (m! e^m) at rho = m / E
    double rho = 0.0;
    double error_scale = 0.0;  // 1 / sqrt(log2 x)
    std::optional<bool> rho_in_range;  // set when kappa is supplied
};

NmMainTerm nm_main_term(const Dataset& data, int m, std::optional<double> kappa = std::nullopt);

// M(x; r) log x / (x e^{Z(x; r)}) with Z(x; r) = rho E + F.
double mr_order_check(const Dataset& data, double rho);

struct PredictionRow {
    std::uint64_t x = 0;
    std::string spec_id;
    int m = 0;
    std::int64_t count = 0;
    std::int64_t signed_sum = 0;
    double poisson = 0.0;
    double thm12_main = 0.0;
    double thm12_err_scale = 0.0;
    double nm_main = 0.0;
    std::optional<double> ratio_poisson;  // count / poisson
    std::optional<double> ratio_thm12;    // signed / thm12_main
    bool in_range = false;
};

// One row per observed m.
std::vector<PredictionRow> prediction_rows(const Dataset& data, double kappa, double c0);

// CSV: x,spec,m,count,signed,poisson,thm12_main,thm12_err_scale,nm_main,ratio_poisson,ratio_thm12.
// Undefined ratios are left empty.
void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows);

}  // namespace mobius
