#include "mobius/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mobius/empirical.hpp"
#include "mobius/errors.hpp"
#include "mobius/format.hpp"
#include "mobius/predictions.hpp"

#ifndef MOBIUS_VERSION
#define MOBIUS_VERSION "0.1.0"
#endif

namespace mobius {

const char* version_string() noexcept { return MOBIUS_VERSION; }

HalaszParams RunConfig::halasz_params() const {
    HalaszParams p;
    p.kappa = kappa;
    p.c0 = c0;
    p.D = D;
    p.K = K;
    p.delta = delta;
    return p;
}

void validate(const RunConfig& c) {
    if (c.x_list.empty()) throw ParameterError("x list is empty");
    if (!std::is_sorted(c.x_list.begin(), c.x_list.end())) throw ParameterError("x list must be ascending");
    if (c.x_list.front() < 3) throw ParameterError("every x must be >= 3");
    if (c.x_list.back() > kMaxSieveLimit) throw CapacityError("x exceeds the 64-bit sieve range");
    if (c.specs.empty()) throw ParameterError("spec list is empty");
    if (c.workers < 1) throw ParameterError("workers must be >= 1");
    if (c.segment_size < 1) throw ParameterError("segment size must be >= 1");
    if (!(c.kappa > 0.0 && c.kappa < 1.0)) throw ParameterError("kappa must lie in (0, 1)");
    if (!(c.c0 > 0.0) || !(c.D > 0.0) || !(c.K > 0.0)) throw ParameterError("c0, D and K must be positive");
    if (c.delta && !(*c.delta > 0.0)) throw ParameterError("delta must be positive");
    for (const auto& s : c.specs) (void)AdditiveSpec::parse(s);
}

TauGridPolicy parse_tau_policy(std::string_view text) {
    auto number = [&](std::string_view tok) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
            throw ParseError("invalid number '" + std::string(tok) + "' in tau policy '" + std::string(text) + "'");
        return v;
    };
    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    TauGridPolicy p;
    if (parts[0] == "coarse") {
        if (parts.size() > 3) throw ParseError("too many fields in tau policy '" + std::string(text) + "'");
        if (parts.size() >= 2) p.step_factor = number(parts[1]);
        if (parts.size() == 3) p.refine_top = static_cast<int>(number(parts[2]));
        if (!(p.step_factor > 0.0) || p.refine_top < 1)
            throw ParseError("tau policy values must be positive in '" + std::string(text) + "'");
        return p;
    }
    if (parts[0] == "dense") {
        if (parts.size() != 2) throw ParseError("expected dense:<points>, got '" + std::string(text) + "'");
        const double n = number(parts[1]);
        if (!(n >= 1.0)) throw ParseError("dense tau grid needs at least one point");
        p.dense_points = static_cast<std::size_t>(n);
        return p;
    }
    throw ParseError("unknown tau policy '" + std::string(parts[0]) + "'");
}

std::string spec_tag(const std::string& spec_id) {
    std::string out = spec_id;
    std::replace(out.begin(), out.end(), ':', '-');
    std::replace(out.begin(), out.end(), ',', '_');
    return out;
}

// -------------------------------------------------------
// Ledger I/O
// -------------------------------------------------------

namespace {

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

}  // namespace

void write_ledger(std::ostream& out, const PrimeSumLedger& ledger) {
    out << "# spec " << ledger.spec_id << '\n';
    for (const auto& cp : ledger.checkpoints) out << cp.x << '\t' << fmt15(cp.E) << '\t' << fmt15(cp.F) << '\n';
}

PrimeSumLedger read_ledger(std::istream& in, const std::string& spec_id) {
    PrimeSumLedger ledger{spec_id, {}};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            constexpr std::string_view tag = "# spec ";
            if (line.rfind(tag, 0) == 0) ledger.spec_id = line.substr(tag.size());
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string col; std::getline(ss, col, '\t');) cols.push_back(col);
        if (cols.size() != 3)
            throw ParseError("ledger line " + std::to_string(lineno) + ": expected 3 tab-separated columns", lineno);
        LedgerCheckpoint cp{};
        auto bad = [&](int column) {
            return ParseError("ledger line " + std::to_string(lineno) + ": malformed column " +
                                  std::to_string(column) + " '" + cols[column - 1] + "'",
                              lineno);
        };
        {
            const auto& s = cols[0];
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cp.x);
            if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw bad(1);
        }
        double* fields[] = {&cp.E, &cp.F};
        for (int k = 0; k < 2; ++k) {
            const auto& s = cols[k + 1];
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *fields[k]);
            if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(*fields[k]))
                throw bad(k + 2);
        }
        if (!ledger.checkpoints.empty() && cp.x <= ledger.checkpoints.back().x)
            throw ParseError("ledger line " + std::to_string(lineno) + ": x not ascending", lineno);
        ledger.checkpoints.push_back(cp);
    }
    return ledger;
}

void save_ledger(const std::filesystem::path& path, const PrimeSumLedger& ledger) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write ledger " + path.string());
    write_ledger(out, ledger);
    if (!out) throw IoError("write failed for " + path.string());
}

PrimeSumLedger load_ledger(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read ledger " + path.string());
    return read_ledger(in);
}

// -------------------------------------------------------
// Sweep
// -------------------------------------------------------

namespace {

class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
            throw IoError("cannot create output directory " + dir_.string());
    }

    template <class Writer>
    std::filesystem::path write(const std::string& name, Writer&& writer) {
        auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        writer(out);
        out.flush();
        if (!out) throw IoError("write failed for " + path.string());
        return path;
    }

    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
};

double num(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

SweepResult run_sweep(const RunConfig& config) {
    validate(config);
    OutputDir out(config.out_dir);
    SweepResult result;
    // Parameter derivations need log log log x; below this floor a run still
    // gets spectra, predictions and audits but no condition report.
    constexpr std::uint64_t kDerivedFloor = 16;
    const auto first_derived = std::find_if(config.x_list.begin(), config.x_list.end(),
                                            [](std::uint64_t x) { return x >= kDerivedFloor; });
    std::optional<double> probe_delta = config.delta;
    if (first_derived != config.x_list.end())
        probe_delta = derive_params(config.halasz_params(), static_cast<double>(*first_derived)).delta;

    nlohmann::ordered_json summary;
    summary["version"] = version_string();
    summary["config"] = {
        {"x_list", config.x_list},
        {"specs", config.specs},
        {"kappa", config.kappa},
        {"c0", config.c0},
        {"D", config.D},
        {"K", config.K},
        {"delta", probe_delta ? nlohmann::ordered_json(*probe_delta) : nlohmann::ordered_json()},
        {"theta_steps", config.theta_steps},
        {"tau_policy",
         {{"step_factor", config.tau_policy.step_factor},
          {"refine_width", config.tau_policy.refine_width},
          {"refine_top", config.tau_policy.refine_top},
          {"dense_points", config.tau_policy.dense_points}}},
        {"segment_size", config.segment_size},
    };
    summary["constants"] = {{"c", concentration_constant()}};

    auto fail = [&](const std::string& name) {
        result.failures.push_back(name);
        result.exit_code = 1;
    };

    const auto thetas = theta_grid(config.theta_steps);
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();

    for (const auto& spec_text : config.specs) {
        const auto spec = AdditiveSpec::parse(spec_text);
        const std::string tag = spec_tag(spec.id());
        const auto spectra_list = spectra(config.x_list, spec, config.sieve_options());

        // Prime-sum ledger, resumed from a checkpoint when one exists.
        const auto grid = checkpoint_grid(config.x_list.back(), config.x_list);
        PrimeSumLedger ledger;
        bool resumed = false;
        std::optional<std::filesystem::path> ckpt_path;
        if (config.checkpoint) {
            ckpt_path = *config.checkpoint / ("ledger_" + tag + ".tsv");
            if (std::filesystem::exists(*ckpt_path)) {
                auto base = load_ledger(*ckpt_path);
                if (base.spec_id == spec.id()) {
                    ledger = extend_ledger(base, spec, grid);
                    resumed = true;
                }
            }
        }
        if (!resumed) ledger = build_ledger(spec, grid);
        result.files.push_back(out.write("ledger_" + tag + ".tsv", [&](std::ostream& os) { write_ledger(os, ledger); }));
        if (ckpt_path) {
            std::error_code ec;
            std::filesystem::create_directories(*config.checkpoint, ec);
            save_ledger(*ckpt_path, ledger);
        }

        double calibrated_slack = NAN;
        for (std::size_t xi = 0; xi < config.x_list.size(); ++xi) {
            const std::uint64_t x = config.x_list[xi];
            const double xd = static_cast<double>(x);
            Dataset data(spectra_list[xi], PrimeTable(x, spec), lambda_f(spec, x));
            const auto& s = data.spectrum;
            const std::string stem = tag + "_" + std::to_string(x);
            nlohmann::ordered_json run;
            run["x"] = x;
            run["spec"] = spec.id();

            result.files.push_back(out.write("spectrum_" + stem + ".csv", [&](std::ostream& os) { write_spectrum_csv(os, s); }));

            const auto rows = prediction_rows(data, config.kappa, config.c0);
            result.files.push_back(out.write("predictions_" + stem + ".csv", [&](std::ostream& os) { write_predictions_csv(os, rows); }));

            const TauProfile profile(data.primes, std::log(xd), config.tau_policy);
            const auto audits = audit_theta_grid(profile, thetas, config.workers);
            result.files.push_back(out.write("audit_" + stem + ".csv", [&](std::ostream& os) { write_audit_csv(os, audits); }));

            const bool has_derived = x >= kDerivedFloor;
            std::vector<ConditionReport> conditions;
            std::optional<DerivedParams> derived;
            if (has_derived) {
                derived = derive_params(config.halasz_params(), xd);
                for (double t : thetas) conditions.push_back(audit_thm13_conditions(data.primes, 1.0, t, *derived));
            }
            result.files.push_back(out.write("conditions_" + stem + ".csv", [&](std::ostream& os) { write_conditions_csv(os, conditions); }));

            // Scalars and ledger constants
            const double E = data.E(), F = data.F();
            run["E"] = E;
            run["F"] = F;
            run["lambda_f"] = data.lambda.value;
            run["lambda_f_tail_bound"] = data.lambda.tail_bound;
            run["lambda_f_e2F"] = data.lambda.value * std::exp(-2.0 * F);
            run["mertens"] = s.mertens();
            run["squarefree"] = s.squarefree();
            run["q_plain"] = s.q_plain;
            run["q_mobius"] = s.q_mobius;
            run["halasz_ratio"] = static_cast<double>(s.q_plain) / halasz_concentration_bound(xd, E);
            run["thm11_ratio"] = static_cast<double>(s.q_mobius) / thm11_bound(xd, E, F);
            run["mr_order_ratio"] = mr_order_check(data, 1.0);
            const auto env = thm11_envelope(data.primes);
            run["envelope_constant"] = env.ratio;

            double max_deficit = -INFINITY;
            bool relaxed_ok = true;
            for (const auto& a : audits) {
                max_deficit = std::max(max_deficit, a.lower_bound_23 - a.computed_m);
                relaxed_ok = relaxed_ok && a.relaxed_bound <= a.lower_bound_23 + 1e-9;
            }
            if (xi == 0) calibrated_slack = max_deficit;
            run["audit_max_deficit"] = max_deficit;
            run["audit_calibrated_slack"] = calibrated_slack;

            double max31 = 0.0;
            for (double t : thetas) max31 = std::max(max31, bound31_shape(data, 1.0, t, config.kappa).fitted);
            run["bound31_fitted_max"] = max31;
            run["main_term_32_residual_theta0"] = main_term_32(data, 1.0, 0.0).residual;

            if (has_derived) {
                const auto hyp = check_hypotheses(data.primes, config.D, config.c0);
                run["hypotheses"] = {{"F_over_log3", hyp.f_over_log3},
                                     {"restricted_cut", hyp.restricted_cut},
                                     {"restricted_sum", hyp.restricted_sum},
                                     {"sufficient_ratio", hyp.sufficient_ratio}};
                run["params"] = {{"b_frak", derived->b_frak},
                                 {"h_frak", derived->h_frak},
                                 {"c_frak_kappa_b", derived->c_frak_kappa_b},
                                 {"c_frak_b_over_A", derived->c_frak_b_over_A},
                                 {"beta", derived->beta},
                                 {"delta", derived->delta},
                                 {"delta_in_window", derived->delta_in_window},
                                 {"b_exponent", derived->b_exponent},
                                 {"theta0", derived->theta0},
                                 {"theta0_reported", derived->theta0_reported},
                                 {"small_theta_covers_all", derived->small_theta_covers_all},
                                 {"K_min", derived->K_min},
                                 {"K_ok", derived->K_ok},
                                 {"c2_resolved", false}};
            } else {
                run["hypotheses"] = nullptr;
                run["params"] = nullptr;
            }

            // Invariants
            nlohmann::ordered_json inv;
            auto check = [&](const std::string& name, bool ok) {
                inv[name] = ok;
                if (!ok) fail(spec.id() + "@" + std::to_string(x) + ":" + name);
            };
            bool bounded = true;
            for (std::size_t m = 0; m < s.degree(); ++m)
                bounded = bounded && std::abs(s.signed_sums[m]) <= s.counts[m];
            check("signed_bounded_by_counts", bounded);
            check("q_mobius_le_q_plain", s.q_mobius <= s.q_plain);
            double pmax = 0.0;
            for (auto v : s.signed_sums) pmax = std::max(pmax, std::fabs(static_cast<double>(v)));
            bool dual = true;
            for (double rho : {0.5, 1.0, 2.0}) {
                const auto rec = fourier_extract(s, rho);
                for (std::size_t m = 0; m < rec.size(); ++m)
                    dual = dual && std::fabs(rec[m] - static_cast<double>(s.signed_sums[m])) < 1e-4 * std::max(pmax, 1.0);
            }
            check("fourier_duality", dual);
            CompensatedSum all;
            for (double v : data.primes.inv_p()) all.add(v);
            check("E_plus_F_equals_prime_harmonic", std::fabs(E + F - all.value()) <= 1e-12 * all.value());
            check("relaxed_le_sharp", relaxed_ok);
            bool finite = true;
            for (const auto& r : rows)
                finite = finite && std::isfinite(r.poisson) && std::isfinite(r.thm12_main) && std::isfinite(r.nm_main);
            for (const auto& a : audits) finite = finite && std::isfinite(a.computed_m) && std::isfinite(a.slack);
            check("finite_outputs", finite);
            run["invariants"] = inv;

            for (auto& [k, v] : run.items())
                if (v.is_number_float()) v = num(v.get<double>());
            runs.push_back(run);
        }
    }
    summary["runs"] = runs;
    summary["failures"] = result.failures;
    summary["status"] = result.exit_code == 0 ? "pass" : "fail";
    result.files.push_back(out.write("summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; }));
    return result;
}

}  // namespace mobius
