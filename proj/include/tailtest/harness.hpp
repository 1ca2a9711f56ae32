#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tailtest/tester.hpp"

namespace tailtest {

// Per-bucket aggregate over replicates. Degenerate statistics are left out
// of the moments and counted separately; mean/std are empty when no
// replicate produced a finite value.
struct ReplicationRow {
    int i;
    std::optional<double> s_hat_mean;
    std::optional<double> s_hat_std;  // sample standard deviation (n-1)
    std::size_t degenerate;
    std::optional<double> proxy_s;  // analytic S(i/k); empty where singular
    double threshold;
    double boundary;
};

struct ReplicationReport {
    std::string model;
    TestConfig config;
    std::size_t n = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<Verdict> verdicts;
    std::vector<ReplicationRow> rows;

    std::size_t heavy_count() const;
};

/// Runs the configured tester `reps` times with seeds base_seed + r and
/// aggregates per-bucket moments of the statistic. Replicates run on up to
/// `threads` workers (0 = hardware concurrency); results are gathered by
/// replicate index so the report does not depend on scheduling.
ReplicationReport replicate(const DistributionModel& model, std::size_t reps, std::size_t n,
                            const TestConfig& config, std::uint64_t base_seed,
                            unsigned threads = 0);

enum class SampleFormat {
    text,  // one decimal per line; '#' comment lines and blank lines skipped
    raw_f64,  // packed little-endian IEEE-754 binary64
};

// Values in file order. Throws ParseError (line or byte offset) and
// DomainError on negative or non-finite values.
std::vector<double> read_samples(const std::filesystem::path& path, SampleFormat format);
std::vector<double> parse_text_samples(std::istream& in);

SortedSampleSplit load_samples(const std::filesystem::path& path, SampleFormat format);

// Round-robin on file order, then sorted. Time-ordered data should be
// shuffled first: the split assumes exchangeable input.
FourSplits load_four_splits(const std::filesystem::path& path, SampleFormat format);

void write_samples(std::ostream& out, const std::vector<double>& values, SampleFormat format);

enum class ReportFormat { json, csv };

nlohmann::ordered_json to_json(const TestOutcome& outcome);
nlohmann::ordered_json to_json(const ReplicationReport& report);

// Inverse of to_json for the fields the report carries.
TestOutcome outcome_from_json(const nlohmann::json& j);

void write_report(const TestOutcome& outcome, std::ostream& sink, ReportFormat format);
void write_report(const ReplicationReport& report, std::ostream& sink, ReportFormat format);

// Locale-independent shortest-form decimal with up to 17 significant digits.
std::string format_decimal(double v);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace tailtest
