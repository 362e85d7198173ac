// mobius_bench: command-line driver for the sieve, spectra, predictions,
// bound audits, sweeps and acceptance suites.
//
// Exit codes: 0 pass, 1 hard failure, 2 usage error, 3 I/O error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mobius/empirical.hpp"
#include "mobius/errors.hpp"
#include "mobius/experiment.hpp"
#include "mobius/format.hpp"
#include "mobius/halasz.hpp"
#include "mobius/predictions.hpp"
#include "mobius/verify.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Accepts plain integers and the shorthands 1e6 / 10^6.
std::uint64_t parse_x(const std::string& text) {
    const auto caret = text.find('^');
    double v = 0.0;
    try {
        if (caret != std::string::npos)
            v = std::pow(std::stod(text.substr(0, caret)), std::stod(text.substr(caret + 1)));
        else if (text.find_first_of("eE.") != std::string::npos)
            v = std::stod(text);
        else
            return std::stoull(text);
    } catch (const std::exception&) {
        throw mobius::ParameterError("bad --x value '" + text + "'");
    }
    if (!(v >= 1.0) || v > 9.2e18 || std::floor(v) != v)
        throw mobius::ParameterError("--x value '" + text + "' is not a positive integer");
    return static_cast<std::uint64_t>(v);
}

struct CliOptions {
    std::vector<std::string> x_text;
    std::vector<std::string> specs;
    std::string tau_policy = "coarse";
    std::string checkpoint;
    std::string suite;
    bool list_suites = false;
    mobius::RunConfig config;
};

mobius::RunConfig resolve(const CliOptions& o, bool needs_x) {
    mobius::RunConfig c = o.config;
    for (const auto& t : o.x_text) c.x_list.push_back(parse_x(t));
    c.specs = o.specs.empty() ? std::vector<std::string>{"omega"} : o.specs;
    c.tau_policy = mobius::parse_tau_policy(o.tau_policy);
    if (!o.checkpoint.empty()) c.checkpoint = o.checkpoint;
    if (c.workers == 0) throw mobius::ParameterError("--workers must be at least 1");
    if (needs_x) mobius::validate(c);
    return c;
}

// ---------------------------------------------------------------------------

int cmd_sieve(const mobius::RunConfig& c) {
    std::cout << "x,spec,mertens,squarefree,degree,seconds\n";
    for (const auto& text : c.specs) {
        const auto spec = mobius::AdditiveSpec::parse(text);
        const auto t0 = std::chrono::steady_clock::now();
        const auto reports = mobius::spectra(c.x_list, spec, c.sieve_options());
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& r : reports) {
            std::cout << r.x << ',' << mobius::csv_field(r.spec_id) << ',' << r.mertens() << ','
                      << r.squarefree() << ',' << r.degree() << ',' << mobius::format_number(secs) << '\n';
        }
    }
    return kExitPass;
}

int cmd_spectrum(const mobius::RunConfig& c) {
    bool header = true;
    for (const auto& text : c.specs) {
        const auto spec = mobius::AdditiveSpec::parse(text);
        for (const auto& r : mobius::spectra(c.x_list, spec, c.sieve_options())) {
            if (header) {
                mobius::write_spectrum_csv(std::cout, r);
                header = false;
            } else {
                // header already printed; drop the first line of the block
                std::ostringstream buf;
                mobius::write_spectrum_csv(buf, r);
                const auto s = buf.str();
                std::cout << s.substr(s.find('\n') + 1);
            }
        }
    }
    return kExitPass;
}

int cmd_predict(const mobius::RunConfig& c) {
    std::vector<mobius::PredictionRow> rows;
    for (const auto& text : c.specs) {
        const auto spec = mobius::AdditiveSpec::parse(text);
        for (auto x : c.x_list) {
            const auto data = mobius::load_dataset(x, spec, c.sieve_options());
            auto part = mobius::prediction_rows(data, c.kappa, c.c0);
            rows.insert(rows.end(), part.begin(), part.end());
        }
    }
    mobius::write_predictions_csv(std::cout, rows);
    return kExitPass;
}

int cmd_audit(const mobius::RunConfig& c) {
    std::vector<mobius::BoundAudit> rows;
    const auto thetas = mobius::theta_grid(c.theta_steps);
    for (const auto& text : c.specs) {
        const auto spec = mobius::AdditiveSpec::parse(text);
        for (auto x : c.x_list) {
            const mobius::PrimeTable table(x, spec);
            const mobius::TauProfile profile(table, std::log(static_cast<double>(x)), c.tau_policy);
            auto part = mobius::audit_theta_grid(profile, thetas, c.workers);
            rows.insert(rows.end(), part.begin(), part.end());
        }
    }
    mobius::write_audit_csv(std::cout, rows);
    return kExitPass;
}

int cmd_sweep(const mobius::RunConfig& c) {
    const auto result = mobius::run_sweep(c);
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    for (const auto& f : result.failures) std::cerr << "invariant failed: " << f << '\n';
    return result.exit_code == 0 ? kExitPass : kExitFailure;
}

int cmd_verify(const CliOptions& o) {
    if (o.list_suites) {
        for (const auto& s : mobius::available_suites()) std::cout << s.name << "  " << s.description << '\n';
        return kExitPass;
    }
    const auto c = resolve(o, false);
    const auto results = mobius::run_suite(o.suite, c);
    for (const auto& r : results) std::cout << mobius::format_result(r) << '\n';
    const bool ok = mobius::all_hard_passed(results);
    std::cout << (ok ? "suite passed" : "suite FAILED") << '\n';
    return ok ? kExitPass : kExitFailure;
}

void add_common(CLI::App* app, CliOptions& o, bool required_x) {
    auto* x = app->add_option("--x", o.x_text, "x values (comma separated; 1e6 and 10^6 accepted)")
                  ->delimiter(',');
    if (required_x) x->required();
    app->add_option("--spec", o.specs, "additive specs: omega | threshold:y | residue:q:a:v | list:p1,p2")
        ->take_all();
    app->add_option("--workers", o.config.workers, "sieve worker threads");
    app->add_option("--segment-size", o.config.segment_size, "sieve block length");
}

void add_model(CLI::App* app, CliOptions& o) {
    app->add_option("--kappa", o.config.kappa, "kappa in (0, 1]");
    app->add_option("--c0", o.config.c0, "c0 > 0");
    app->add_option("--D", o.config.D, "D > 1");
    app->add_option("--K", o.config.K, "K > 0");
    app->add_option("--delta", o.config.delta, "delta (default derived)");
}

void add_halasz(CLI::App* app, CliOptions& o) {
    app->add_option("--theta-steps", o.config.theta_steps, "theta grid has steps + 1 points on [-1/2, 1/2]");
    app->add_option("--tau-policy", o.tau_policy, "coarse[:step_factor[:top]] | dense:N");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mobius / additive-function spectra, predictions and bound audits"};
    app.set_version_flag("--version", std::string(mobius::version_string()));
    app.require_subcommand(1);

    CliOptions o;
    auto* sieve = app.add_subcommand("sieve", "Mertens function and squarefree count");
    add_common(sieve, o, true);

    auto* spectrum = app.add_subcommand("spectrum", "spectrum CSV (x,m,count,signed) on stdout");
    add_common(spectrum, o, true);

    auto* predict = app.add_subcommand("predict", "predictions CSV on stdout");
    add_common(predict, o, true);
    add_model(predict, o);

    auto* audit = app.add_subcommand("audit", "lower-bound audit CSV over the theta grid on stdout");
    add_common(audit, o, true);
    add_halasz(audit, o);

    auto* sweep = app.add_subcommand("sweep", "full sweep into --out with JSON summary");
    add_common(sweep, o, true);
    add_model(sweep, o);
    add_halasz(sweep, o);
    sweep->add_option("--out", o.config.out_dir, "output directory");
    sweep->add_option("--checkpoint", o.checkpoint, "directory holding resumable prime-sum ledgers");

    auto* verify = app.add_subcommand("verify", "run an acceptance suite");
    verify->add_option("suite", o.suite, "suite name (see --list)");
    verify->add_flag("--list", o.list_suites, "list suites and exit");
    add_common(verify, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*verify) {
            if (o.suite.empty() && !o.list_suites) {
                std::cerr << "verify: a suite name is required\n";
                for (const auto& s : mobius::available_suites()) std::cerr << "  " << s.name << '\n';
                return kExitUsage;
            }
            return cmd_verify(o);
        }
        const auto c = resolve(o, true);
        if (*sieve) return cmd_sieve(c);
        if (*spectrum) return cmd_spectrum(c);
        if (*predict) return cmd_predict(c);
        if (*audit) return cmd_audit(c);
        if (*sweep) return cmd_sweep(c);
    } catch (const mobius::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const mobius::CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mobius::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
