#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace fbmcf {

/// Full-precision rendering used for every number persisted to CSV.
/// 17 significant digits round-trip any double exactly.
inline std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// CSV file with `# key=value` configuration header lines, a column-name
/// row, and %.17g numeric rows. Deterministic: same inputs, same bytes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::map<std::string, std::string>& config_echo,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
        for (const auto& [key, value] : config_echo) out_ << "# " << key << "=" << value << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << csv_number(values[i]) << (i + 1 < values.size() ? "," : "\n");
    }

    /// Row with a leading string cell (estimate names etc.).
    void row(const std::string& label, const std::vector<double>& values,
             const std::string& trailing = "") {
        out_ << label;
        for (double v : values) out_ << "," << csv_number(v);
        if (!trailing.empty()) out_ << "," << trailing;
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

}  // namespace fbmcf
