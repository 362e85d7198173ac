#include "mobius/empirical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "mobius/errors.hpp"

namespace mobius {

namespace {

// omega(n) <= 15 for every n below 2^62.
constexpr std::size_t kMaxDegree = 16;

struct Histogram {
    std::array<std::int64_t, kMaxDegree> counts{};
    std::array<std::int64_t, kMaxDegree> signed_sums{};

    Histogram& operator+=(const Histogram& o) noexcept {
        for (std::size_t m = 0; m < kMaxDegree; ++m) {
            counts[m] += o.counts[m];
            signed_sums[m] += o.signed_sums[m];
        }
        return *this;
    }
};

SpectrumReport finish(std::uint64_t x, const std::string& spec_id, const Histogram& h) {
    SpectrumReport r;
    r.x = x;
    r.spec_id = spec_id;
    std::size_t degree = 1;
    for (std::size_t m = 0; m < kMaxDegree; ++m)
        if (h.counts[m] != 0) degree = m + 1;
    r.counts.assign(h.counts.begin(), h.counts.begin() + static_cast<std::ptrdiff_t>(degree));
    r.signed_sums.assign(h.signed_sums.begin(), h.signed_sums.begin() + static_cast<std::ptrdiff_t>(degree));
    for (std::size_t m = 0; m < degree; ++m) {
        r.q_plain = std::max(r.q_plain, r.counts[m]);
        r.q_mobius = std::max(r.q_mobius, std::abs(r.signed_sums[m]));
    }
    return r;
}

void check_rho(double rho, std::optional<double> kappa) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("rho must be positive and finite");
    if (kappa) {
        if (!(*kappa > 0.0 && *kappa < 1.0)) throw ParameterError("kappa must lie in (0, 1)");
        if (rho < *kappa || rho > 1.0 / *kappa)
            throw ParameterError("rho = " + std::to_string(rho) + " outside [kappa, 1/kappa]");
    }
}

std::complex<double> unit(double turns) { return std::polar(1.0, 2.0 * std::numbers::pi * turns); }

// M(x; g) * exp(-log_scale), with the rho^m weights formed in log space.
std::complex<double> scaled_mean_value_g(const SpectrumReport& report, double rho, double theta,
                                         double log_scale) {
    const double log_rho = std::log(rho);
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < report.degree(); ++m) {
        const double mag = std::exp(static_cast<double>(m) * log_rho - log_scale);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        acc += static_cast<double>(report.signed_sums[m]) * sign * mag * unit(theta * static_cast<double>(m));
    }
    return acc;
}

}  // namespace

std::int64_t SpectrumReport::squarefree() const noexcept {
    std::int64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

std::int64_t SpectrumReport::mertens() const noexcept {
    std::int64_t s = 0;
    for (auto c : signed_sums) s += c;
    return s;
}

std::vector<SpectrumReport> spectra(std::span<const std::uint64_t> xs, const AdditiveSpec& spec,
                                    const SieveOptions& options) {
    if (xs.empty()) return {};
    if (xs.front() < 1) throw ParameterError("spectrum: x must be >= 1");
    if (!std::is_sorted(xs.begin(), xs.end())) throw ParameterError("spectrum: x values must be ascending");
    const std::vector<std::uint64_t> cuts(xs.begin(), xs.end());
    const std::uint64_t top = cuts.back();

    BlockSiever siever(top, spec);
    auto per_block = map_blocks(siever, top, options, [&cuts](const SievedBlock& b) {
        // Slot k collects n in (cuts[k-1], cuts[k]].
        std::vector<Histogram> slots(cuts.size());
        std::uint64_t n = b.lo;
        std::size_t k = static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), n) - cuts.begin());
        while (n < b.hi && k < cuts.size()) {
            const std::uint64_t stop = std::min<std::uint64_t>(b.hi, cuts[k] + 1);
            auto& h = slots[k];
            for (; n < stop; ++n) {
                const std::size_t j = n - b.lo;
                const int mu = b.mu[j];
                if (mu == 0) continue;
                const std::uint8_t m = b.fval[j];
                h.counts[m] += 1;
                h.signed_sums[m] += mu;
            }
            ++k;
        }
        return slots;
    });

    std::vector<Histogram> by_slot(cuts.size());
    for (const auto& slots : per_block)
        for (std::size_t k = 0; k < cuts.size(); ++k) by_slot[k] += slots[k];

    std::vector<SpectrumReport> out;
    Histogram running;
    const std::string id = spec.id();
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        running += by_slot[k];
        out.push_back(finish(cuts[k], id, running));
    }
    return out;
}

SpectrumReport spectrum(std::uint64_t x, const AdditiveSpec& spec, const SieveOptions& options) {
    const std::uint64_t xs[] = {x};
    return std::move(spectra(xs, spec, options).front());
}

std::complex<double> exp_sum_M(const SpectrumReport& report, double theta) {
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < report.degree(); ++m)
        acc += static_cast<double>(report.signed_sums[m]) * unit(theta * static_cast<double>(m));
    return acc;
}

std::vector<FourierSample> sample_exp_sum(const SpectrumReport& report, std::span<const double> thetas) {
    std::vector<FourierSample> out;
    out.reserve(thetas.size());
    for (double t : thetas) out.push_back({t, exp_sum_M(report, t)});
    return out;
}

std::complex<double> mean_value_g(const SpectrumReport& report, double rho, double theta,
                                  std::optional<double> kappa) {
    check_rho(rho, kappa);
    return scaled_mean_value_g(report, rho, theta, 0.0);
}

double mean_value_r(const SpectrumReport& report, double rho, std::optional<double> kappa) {
    check_rho(rho, kappa);
    double acc = 0.0;
    double w = 1.0;
    for (std::size_t m = 0; m < report.degree(); ++m) {
        acc += static_cast<double>(report.counts[m]) * w;
        w *= rho;
    }
    return acc;
}

std::complex<double> z_sum(const PrimeTable& table, double rho, double theta, ZWhich which) {
    if (table.x() < 2) throw ParameterError("z_sum: x must be >= 2");
    // Per-prime values for f(p) = 1 and f(p) = 0; the sum splits as E and F.
    const std::complex<double> g1 = rho * unit(theta);
    const std::complex<double> g0 = -1.0;
    std::complex<double> v1, v0;
    switch (which) {
        case ZWhich::g: v1 = g1; v0 = g0; break;
        case ZWhich::r: v1 = rho; v0 = 1.0; break;
        case ZWhich::abs_g_minus_g:
        case ZWhich::r_minus_g: v1 = rho - g1; v0 = 1.0 - g0; break;
    }
    CompensatedSum re, im;
    const auto inv = table.inv_p();
    const auto f = table.f();
    for (std::size_t i = 0; i < inv.size(); ++i) {
        const auto& v = f[i] ? v1 : v0;
        re.add(v.real() * inv[i]);
        im.add(v.imag() * inv[i]);
    }
    return {re.value(), im.value()};
}

std::vector<double> fourier_extract(const SpectrumReport& report, double rho) {
    check_rho(rho, std::nullopt);
    const std::size_t d = report.degree();
    if (d == 0) throw ParameterError("fourier_extract: empty spectrum");
    // Centre the rho^m dynamic range when it would leave double range.
    const double span = static_cast<double>(d - 1) * std::fabs(std::log(rho));
    const double log_scale = span > 600.0 ? 0.5 * static_cast<double>(d - 1) * std::log(rho) : 0.0;

    std::vector<std::complex<double>> samples(d);
    for (std::size_t j = 0; j < d; ++j)
        samples[j] = scaled_mean_value_g(report, rho, static_cast<double>(j) / static_cast<double>(d), log_scale);

    std::vector<double> out(d);
    for (std::size_t m = 0; m < d; ++m) {
        std::complex<double> coeff = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            coeff += unit(-static_cast<double>(j * m % d) / static_cast<double>(d)) * samples[j];
        coeff /= static_cast<double>(d);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        out[m] = sign * coeff.real() * std::exp(log_scale - static_cast<double>(m) * std::log(rho));
    }
    return out;
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
    out << "x,m,count,signed\n";
    for (std::size_t m = 0; m < report.degree(); ++m)
        out << report.x << ',' << m << ',' << report.counts[m] << ',' << report.signed_sums[m] << '\n';
}

Dataset load_dataset(std::uint64_t x, const AdditiveSpec& spec, const SieveOptions& options) {
    if (x < 2) throw ParameterError("load_dataset: x must be >= 2");
    return Dataset(spectrum(x, spec, options), PrimeTable(x, spec), lambda_f(spec, x));
}

}  // namespace mobius
