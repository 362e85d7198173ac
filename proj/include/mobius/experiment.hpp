#pragma once
// Sweep orchestration: one sieve pass per spec, then spectra, predictions,
// bound audits and condition reports per (x, spec), written as CSV plus a
// JSON run summary.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mobius/halasz.hpp"
#include "mobius/prime_sums.hpp"
#include "mobius/sieve.hpp"

namespace mobius {

struct RunConfig {
    std::vector<std::uint64_t> x_list;
    std::vector<std::string> specs;
    double kappa = 0.5;
    double c0 = 1.0;
    double D = 2.0;
    double K = 2.0;
    std::optional<double> delta;
    std::size_t theta_steps = 100;
    TauGridPolicy tau_policy;
    unsigned workers = 1;
    std::uint64_t segment_size = kDefaultSegmentSize;
    std::filesystem::path out_dir = "out";
    std::optional<std::filesystem::path> checkpoint;
    std::optional<std::string> suite;

    SieveOptions sieve_options() const { return {segment_size, workers}; }
    HalaszParams halasz_params() const;
};

// Throws ParameterError describing the first violated invariant.
void validate(const RunConfig& config);

// "coarse" | "coarse:<step_factor>" | "coarse:<step_factor>:<top>" | "dense:<points>".
TauGridPolicy parse_tau_policy(std::string_view text);

// File-name-safe form of a spec id ("threshold:3" -> "threshold-3").
std::string spec_tag(const std::string& spec_id);

// Ledger text: one "x<TAB>E<TAB>F" line per checkpoint, 15 significant
// digits; lines starting with '#' are comments. Malformed lines raise
// ParseError carrying the 1-based line number.
void write_ledger(std::ostream& out, const PrimeSumLedger& ledger);
PrimeSumLedger read_ledger(std::istream& in, const std::string& spec_id = {});
void save_ledger(const std::filesystem::path& path, const PrimeSumLedger& ledger);
PrimeSumLedger load_ledger(const std::filesystem::path& path);

struct SweepResult {
    int exit_code = 0;                           // 0 pass, 1 hard invariant failure
    std::vector<std::filesystem::path> files;    // written, in order
    std::vector<std::string> failures;           // names of failed invariants
};

// Writes into config.out_dir. IoError when the directory is not writable.
SweepResult run_sweep(const RunConfig& config);

const char* version_string() noexcept;

}  // namespace mobius
