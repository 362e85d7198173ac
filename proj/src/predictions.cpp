#include "mobius/predictions.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "mobius/errors.hpp"
#include "mobius/format.hpp"

namespace mobius {

double concentration_constant() noexcept {
    constexpr double pi = std::numbers::pi;
    return (2.0 * pi - 4.0) / (3.0 * pi - 2.0);
}

double halasz_concentration_bound(double x, double E) {
    if (E < 0.0) throw ParameterError("halasz_concentration_bound: E must be >= 0");
    return x / std::sqrt(1.0 + E);
}

double thm11_bound(double x, double E, double F) {
    if (E < 0.0 || F < 0.0) throw ParameterError("thm11_bound: E and F must be >= 0");
    return x * (1.0 + F) * std::exp(-concentration_constant() * F) / std::sqrt(1.0 + E);
}

double log_factorial(int m) {
    if (m < 0) throw ParameterError("log_factorial: m must be >= 0");
    double s = 0.0;
    for (int k = 2; k <= m; ++k) s += std::log(static_cast<double>(k));
    return s;
}

double poisson_term(double x, double E, int m) {
    if (!(E > 0.0)) throw ParameterError("poisson_term: E must be > 0");
    if (m < 0) throw ParameterError("poisson_term: m must be >= 0");
    return x * std::exp(static_cast<double>(m) * std::log(E) - E - log_factorial(m));
}

double error_exponent_b(double kappa, double c0) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw ParameterError("kappa must lie in (0, 1)");
    if (!(c0 > 0.0)) throw ParameterError("c0 must be positive");
    return 0.5 * std::min(1.0, c0 * kappa / (4.0 - kappa));
}

Thm12Prediction thm12_prediction(const Dataset& data, int m, double kappa, double c0) {
    const double E = data.E();
    if (!(E > 0.0)) throw DomainError("thm12_prediction: E(x) = 0, range for m undefined");
    if (m < 0) throw ParameterError("thm12_prediction: m must be >= 0");
    Thm12Prediction p;
    p.m = m;
    p.b = error_exponent_b(kappa, c0);
    p.error_scale = std::pow(loglog(static_cast<double>(data.x())), -p.b);
    p.lambda_e2F = data.lambda.value * std::exp(-2.0 * data.F());
    const auto& counts = data.spectrum.counts;
    const double count = static_cast<std::size_t>(m) < counts.size() ? static_cast<double>(counts[m]) : 0.0;
    p.main = ((m % 2 == 0) ? 1.0 : -1.0) * count * p.lambda_e2F;
    p.in_range = kappa * E <= m && m <= E / kappa;
    return p;
}

NmMainTerm nm_main_term(const Dataset& data, int m, std::optional<double> kappa) {
    const double E = data.E();
    if (!(E > 0.0)) throw DomainError("nm_main_term: E(x) = 0");
    if (m < 1) throw ParameterError("nm_main_term: m must be >= 1");
    NmMainTerm t;
    t.rho = static_cast<double>(m) / E;
    const double mr = mean_value_r(data.spectrum, t.rho);
    t.value = mr * std::exp(static_cast<double>(m) * (std::log(E) - 1.0) - log_factorial(m));
    t.error_scale = 1.0 / std::sqrt(loglog(static_cast<double>(data.x())));
    if (kappa) t.rho_in_range = t.rho >= *kappa && t.rho <= 1.0 / *kappa;
    return t;
}

double mr_order_check(const Dataset& data, double rho) {
    const double x = static_cast<double>(data.x());
    if (x < 3.0) throw ParameterError("mr_order_check: x must be >= 3");
    const double z = rho * data.E() + data.F();
    return mean_value_r(data.spectrum, rho) * std::log(x) / (x * std::exp(z));
}

std::vector<PredictionRow> prediction_rows(const Dataset& data, double kappa, double c0) {
    std::vector<PredictionRow> rows;
    const auto& s = data.spectrum;
    const double x = static_cast<double>(data.x());
    for (std::size_t mi = 0; mi < s.degree(); ++mi) {
        const int m = static_cast<int>(mi);
        PredictionRow row;
        row.x = data.x();
        row.spec_id = s.spec_id;
        row.m = m;
        row.count = s.counts[mi];
        row.signed_sum = s.signed_sums[mi];
        if (data.E() > 0.0) {
            row.poisson = poisson_term(x, data.E(), m);
            const auto pred = thm12_prediction(data, m, kappa, c0);
            row.thm12_main = pred.main;
            row.thm12_err_scale = pred.error_scale;
            row.in_range = pred.in_range;
            row.nm_main = m >= 1 ? nm_main_term(data, m).value : static_cast<double>(s.counts[0]);
            if (row.poisson > 0.0) row.ratio_poisson = static_cast<double>(row.count) / row.poisson;
            if (row.thm12_main != 0.0) row.ratio_thm12 = static_cast<double>(row.signed_sum) / row.thm12_main;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
    out << "x,spec,m,count,signed,poisson,thm12_main,thm12_err_scale,nm_main,ratio_poisson,ratio_thm12\n";
    for (const auto& r : rows) {
        out << r.x << ',' << csv_field(r.spec_id) << ',' << r.m << ',' << r.count << ',' << r.signed_sum << ','
            << format_number(r.poisson) << ',' << format_number(r.thm12_main) << ','
            << format_number(r.thm12_err_scale) << ',' << format_number(r.nm_main) << ','
            << (r.ratio_poisson ? format_number(*r.ratio_poisson) : "") << ','
            << (r.ratio_thm12 ? format_number(*r.ratio_thm12) : "") << '\n';
    }
}

}  // namespace mobius
