#include "cli_args.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <CLI11.hpp>

namespace moment_ensemble::cli {

namespace {

std::string shortest(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

const CLI::Validator positive_number(
    [](std::string& text) -> std::string {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size())
            return "malformed number '" + text + "'";
        if (!(v > 0.0) || v == HUGE_VAL)
            return "expected a positive number, got '" + text + "'";
        return {};
    },
    "POSITIVE");

} // namespace

Command parse_args(const std::vector<std::string>& args) {
    Command cmd;
    CLI::App app{"Moment-based ensemble control", "moment_ensemble"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    app.add_option("--out", cmd.out, "output directory (default: $MOMENT_ENSEMBLE_OUT)");
    app.add_option("--dt", cmd.dt, "integration step")->check(positive_number);
    app.add_option("--T", cmd.T, "horizon")->check(positive_number);
    app.add_option("--grid-points", cmd.grid_points, "parameter nodes per axis")->check(CLI::Range(1, 1000000));
    app.add_flag("--quiet", cmd.quiet, "no stdout output");

    auto* simulate = app.add_subcommand("simulate", "run a preset or a JSON config file");
    simulate->add_option("target", cmd.target, "preset name or config path")->required();
    simulate->add_option("--set", cmd.set, "config override key=value (repeatable)");

    auto* moments = app.add_subcommand("moments", "moments of a profile CSV");
    moments->add_option("profile", cmd.target, "profile CSV")->required();
    moments->add_option("--order", cmd.order, "truncation order")->check(CLI::Range(0, 200));
    moments->add_flag("--output-moments", cmd.output_moments, "moments of the output distribution");

    auto* hausdorff = app.add_subcommand("check-hausdorff", "Hausdorff moment-condition sweep");
    hausdorff->add_option("moments", cmd.target, "moments CSV")->required();
    hausdorff->add_option("--up-to", cmd.up_to, "largest n per axis")->check(CLI::Range(0, 60));
    auto* l1 = hausdorff->add_flag("--l1", cmd.l1, "L1 (total variation) condition");
    bool l2 = false;
    hausdorff->add_flag("--l2", l2, "L2 condition (default)")->excludes(l1);

    auto* invert = app.add_subcommand("invert", "Bernstein-lattice inversion of unit-cube moments");
    invert->add_option("moments", cmd.target, "moments CSV")->required();
    invert->add_option("--grid", cmd.grid, "lattice resolution n")->check(CLI::Range(1, 60));

    auto* rescale = app.add_subcommand("rescale", "map unit-interval moments to [a, b]");
    rescale->add_option("moments", cmd.target, "moments CSV")->required();
    rescale->add_option("--a", cmd.a, "lower end")->required();
    rescale->add_option("--b", cmd.b, "upper end")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        if (app.get_subcommands().empty() && !app.remaining().empty())
            throw UsageError("unknown subcommand '" + app.remaining().front() + "'");
        throw UsageError(e.what());
    }

    if (simulate->parsed()) {
        cmd.subcommand = Subcommand::simulate;
        for (const auto& s : cmd.set)
            if (s.find('=') == std::string::npos || s.front() == '=')
                throw UsageError("--set: expected key=value, got '" + s + "'");
    } else if (moments->parsed()) {
        cmd.subcommand = Subcommand::moments;
    } else if (hausdorff->parsed()) {
        cmd.subcommand = Subcommand::check_hausdorff;
    } else if (invert->parsed()) {
        cmd.subcommand = Subcommand::invert;
    } else {
        cmd.subcommand = Subcommand::rescale;
        if (!(cmd.b > cmd.a))
            throw UsageError("b must exceed a (got --a " + shortest(cmd.a) + ", --b " + shortest(cmd.b) + ")");
    }
    return cmd;
}

} // namespace moment_ensemble::cli
