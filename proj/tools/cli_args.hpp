#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace moment_ensemble::cli {

enum class Subcommand { simulate, moments, check_hausdorff, invert, rescale };

struct Command {
    Subcommand subcommand = Subcommand::simulate;
    std::string target; ///< preset name / config path, or the input CSV

    std::optional<std::string> out;
    std::optional<double> dt;
    std::optional<double> T;
    std::optional<std::size_t> grid_points;
    std::vector<std::string> set; ///< key=value config overrides
    bool quiet = false;

    unsigned order = 10;
    bool output_moments = false;
    unsigned up_to = 5;
    bool l1 = false;
    unsigned grid = 10;
    double a = 0.0;
    double b = 1.0;
};

/// Bad command line. The message names the offending token.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown for --help; carries the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// args excludes the program name.
[[nodiscard]] Command parse_args(const std::vector<std::string>& args);

} // namespace moment_ensemble::cli
