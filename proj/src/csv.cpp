#include "dpbandits/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dpb {

namespace {

constexpr char kTraceHeader[] = "setting,algorithm,K,epsilon,T,seed,t,cum_regret";
constexpr char kSummaryHeader[] = "setting,algorithm,K,epsilon,T,t,mean_regret,stderr_regret";

std::vector<std::string> split_fields(std::string_view line, size_t expected) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (fields.size() != expected) {
        throw std::runtime_error("csv: malformed row, expected " + std::to_string(expected) +
                                 " fields");
    }
    return fields;
}

double parse_double_field(const std::string& field) {
    if (field.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::stod(field);
}

template <typename RowFn>
void for_each_data_line(std::string_view text, const char* header, RowFn fn) {
    size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) {
            continue;
        }
        if (first) {
            if (line != header) {
                throw std::runtime_error("csv: unexpected header: " + std::string(line));
            }
            first = false;
            continue;
        }
        fn(line);
    }
    if (first) {
        throw std::runtime_error("csv: missing header");
    }
}

}  // namespace

std::string format_g10(double value) {
    if (std::isnan(value)) {
        return "";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out(kTraceHeader);
    out.push_back('\n');
    for (const TraceRow& r : rows) {
        out += r.setting;
        out.push_back(',');
        out += r.algorithm;
        out.push_back(',');
        out += std::to_string(r.num_arms);
        out.push_back(',');
        out += format_g10(r.epsilon);
        out.push_back(',');
        out += std::to_string(r.horizon);
        out.push_back(',');
        out += std::to_string(r.seed);
        out.push_back(',');
        out += std::to_string(r.t);
        out.push_back(',');
        out += format_g10(r.cum_regret);
        out.push_back('\n');
    }
    return out;
}

std::vector<TraceRow> parse_trace_csv(std::string_view text) {
    std::vector<TraceRow> rows;
    for_each_data_line(text, kTraceHeader, [&rows](std::string_view line) {
        auto f = split_fields(line, 8);
        TraceRow r;
        r.setting = f[0];
        r.algorithm = f[1];
        r.num_arms = static_cast<uint32_t>(std::stoul(f[2]));
        r.epsilon = parse_double_field(f[3]);
        r.horizon = std::stoull(f[4]);
        r.seed = std::stoull(f[5]);
        r.t = std::stoull(f[6]);
        r.cum_regret = parse_double_field(f[7]);
        rows.push_back(std::move(r));
    });
    return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out(kSummaryHeader);
    out.push_back('\n');
    for (const SummaryRow& r : rows) {
        out += r.setting;
        out.push_back(',');
        out += r.algorithm;
        out.push_back(',');
        out += std::to_string(r.num_arms);
        out.push_back(',');
        out += format_g10(r.epsilon);
        out.push_back(',');
        out += std::to_string(r.horizon);
        out.push_back(',');
        out += std::to_string(r.t);
        out.push_back(',');
        out += format_g10(r.mean_regret);
        out.push_back(',');
        out += format_g10(r.stderr_regret);
        out.push_back('\n');
    }
    return out;
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text) {
    std::vector<SummaryRow> rows;
    for_each_data_line(text, kSummaryHeader, [&rows](std::string_view line) {
        auto f = split_fields(line, 8);
        SummaryRow r;
        r.setting = f[0];
        r.algorithm = f[1];
        r.num_arms = static_cast<uint32_t>(std::stoul(f[2]));
        r.epsilon = parse_double_field(f[3]);
        r.horizon = std::stoull(f[4]);
        r.t = std::stoull(f[5]);
        r.mean_regret = parse_double_field(f[6]);
        r.stderr_regret = parse_double_field(f[7]);
        rows.push_back(std::move(r));
    });
    return rows;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace dpb
