#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dpb {

/// One checkpoint row of a trace file.
struct TraceRow {
    std::string setting;
    std::string algorithm;
    uint32_t num_arms = 0;
    double epsilon = 0.0;  // NaN emits as an empty field (non-private cell axis)
    uint64_t horizon = 0;
    uint64_t seed = 0;
    uint64_t t = 0;
    double cum_regret = 0.0;
};

/// One checkpoint row of a summary file.
struct SummaryRow {
    std::string setting;
    std::string algorithm;
    uint32_t num_arms = 0;
    double epsilon = 0.0;
    uint64_t horizon = 0;
    uint64_t t = 0;
    double mean_regret = 0.0;
    double stderr_regret = 0.0;
};

/// Shortest decimal form with 10 significant digits (%.10g); NaN -> "".
std::string format_g10(double value);

/// CSV bodies: header always present, UTF-8, LF line terminators.
std::string trace_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> parse_trace_csv(std::string_view text);

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary_csv(std::string_view text);

/// Write-to-temp-then-rename; partial files never appear under the final name.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace dpb
