#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "swelab/bounds.hpp"
#include "swelab/errors.hpp"

namespace swelab::cli {

enum ExitCode : int { kPass = 0, kUsage = 2, kIndeterminate = 3, kFailure = 4 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "SWELAB_OUT_DIR";
inline constexpr int kCsvSchema = 1;

/// Malformed command-line value (exit code 2).
class UsageError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Runs one command; `args` excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// A single number; accepts decimal/exponent notation and p/q fractions.
double parse_number(const std::string& text);

/// Comma-separated numbers ("0.3,0.3" or "1/16,1/32"); empty string -> {}.
std::vector<double> parse_list(const std::string& text);

/// Inclusive start:stop:step grid; a bare list is accepted as well.
/// stop < start yields an empty grid. Values are rounded to 12 decimals so
/// that 0.1 steps print as written.
std::vector<double> parse_grid(const std::string& spec);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a versioned CSV; throws UsageError on a missing or unknown
/// "# schema=N" line or on ragged rows.
CsvTable read_csv(std::istream& in);

/// Polyline plot with axes and min/max tick labels.
std::string svg_line_plot(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

nlohmann::json report_to_json(const bounds::ExperimentReport& report);

/// Copy of a JSON document without its "timing" member, for byte comparisons.
nlohmann::json without_timing(nlohmann::json doc);

/// Default output directory: $SWELAB_OUT_DIR, else "swelab_out".
std::filesystem::path default_out_dir();

}  // namespace swelab::cli
