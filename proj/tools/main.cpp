// Command-line front end. Talks to the library only through the C interface.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "cli_args.hpp"
#include "moment_ensemble/moment_ensemble.h"

namespace {

using moment_ensemble::cli::Command;
using moment_ensemble::cli::Subcommand;

enum Exit { exit_ok = 0, exit_internal = 1, exit_usage = 2, exit_numerical = 3, exit_io = 4 };

struct Failure {
    me_status status;
    std::string message;
};

int exit_code(me_status s) {
    switch (s) {
    case ME_OK: return exit_ok;
    case ME_ERR_INVALID_ARGUMENT: return exit_usage;
    case ME_ERR_NUMERICAL: return exit_numerical;
    case ME_ERR_IO:
    case ME_ERR_PARSE: return exit_io;
    default: return exit_internal;
    }
}

void check(me_status s) {
    if (s != ME_OK)
        throw Failure{s, me_last_error()};
}

struct Deleter {
    void operator()(me_moments* p) const { me_moments_free(p); }
    void operator()(me_profile* p) const { me_profile_free(p); }
    void operator()(me_config* p) const { me_config_free(p); }
    void operator()(me_result* p) const { me_result_free(p); }
    void operator()(char* p) const { me_string_free(p); }
};
template <class T>
using Owned = std::unique_ptr<T, Deleter>;

template <class T, class F>
Owned<T> make(F&& f) {
    T* raw = nullptr;
    check(f(&raw));
    return Owned<T>(raw);
}

std::string take(char* text) {
    Owned<char> owned(text);
    return owned ? std::string(owned.get()) : std::string{};
}

// Writes text to <out>/<name> when --out is given, to stdout otherwise.
void deliver(const Command& cmd, const std::string& name, const std::string& text) {
    if (!cmd.out) {
        if (!cmd.quiet)
            std::fputs(text.c_str(), stdout);
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(*cmd.out, ec);
    const auto path = std::filesystem::path(*cmd.out) / name;
    std::ofstream os(path, std::ios::binary);
    if (!(os << text) || !os.flush())
        throw Failure{ME_ERR_IO, "cannot write '" + path.string() + "'"};
    if (!cmd.quiet)
        std::printf("%s\n", path.string().c_str());
}

std::string format_shortest(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void run_simulate(const Command& cmd) {
    auto cfg = make<me_config>([&](me_config** c) { return me_config_resolve(cmd.target.c_str(), c); });
    if (cmd.dt)
        check(me_config_set(cfg.get(), "dt", format_shortest(*cmd.dt).c_str()));
    if (cmd.T)
        check(me_config_set(cfg.get(), "T", format_shortest(*cmd.T).c_str()));
    if (cmd.grid_points)
        check(me_config_set(cfg.get(), "grid_points", std::to_string(*cmd.grid_points).c_str()));
    for (const auto& kv : cmd.set) {
        const auto eq = kv.find('=');
        check(me_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }

    std::string dir;
    if (cmd.out) {
        dir = *cmd.out;
    } else if (const char* env = std::getenv("MOMENT_ENSEMBLE_OUT"); env && *env) {
        dir = env;
    }
    if (!dir.empty()) {
        check(me_config_set(cfg.get(), "output_dir", dir.c_str()));
    } else {
        char* value = nullptr;
        check(me_config_get(cfg.get(), "output_dir", &value));
        dir = take(value);
        if (dir.empty())
            dir = "moment_ensemble_out";
    }

    auto result = make<me_result>([&](me_result** r) { return me_run(cfg.get(), r); });
    char* paths = nullptr;
    check(me_result_write(result.get(), dir.c_str(), &paths));
    const std::string written = take(paths);
    if (!cmd.quiet) {
        char* report = nullptr;
        check(me_result_report(result.get(), &report));
        std::fputs(take(report).c_str(), stdout);
        std::fputs(written.c_str(), stdout);
    }
}

int dispatch(const Command& cmd) {
    switch (cmd.subcommand) {
    case Subcommand::simulate:
        run_simulate(cmd);
        break;
    case Subcommand::moments: {
        auto profile = make<me_profile>([&](me_profile** p) { return me_profile_load_csv(cmd.target.c_str(), p); });
        auto m = make<me_moments>([&](me_moments** out) {
            return me_compute_moments(profile.get(), cmd.order, cmd.output_moments ? 1 : 0, out);
        });
        char* text = nullptr;
        check(me_moments_to_csv(m.get(), &text));
        deliver(cmd, cmd.output_moments ? "output_moments.csv" : "moments.csv", take(text));
        break;
    }
    case Subcommand::check_hausdorff: {
        auto m = make<me_moments>([&](me_moments** out) { return me_moments_load_csv(cmd.target.c_str(), out); });
        double max_value = 0.0;
        char* report = nullptr;
        check(me_check_hausdorff(m.get(), cmd.up_to, cmd.l1 ? ME_NORM_L1 : ME_NORM_L2, &max_value, &report));
        deliver(cmd, "hausdorff.csv", take(report));
        if (!cmd.quiet)
            std::fprintf(stderr, "%s constant up to n = %u: %.17g\n", cmd.l1 ? "L1" : "L2", cmd.up_to, max_value);
        break;
    }
    case Subcommand::invert: {
        auto m = make<me_moments>([&](me_moments** out) { return me_moments_load_csv(cmd.target.c_str(), out); });
        auto density = make<me_profile>([&](me_profile** p) { return me_invert_moments(m.get(), cmd.grid, p); });
        char* text = nullptr;
        check(me_profile_to_csv(density.get(), &text));
        deliver(cmd, "density.csv", take(text));
        break;
    }
    case Subcommand::rescale: {
        auto m = make<me_moments>([&](me_moments** out) { return me_moments_load_csv(cmd.target.c_str(), out); });
        size_t d = 0;
        check(me_moments_shape(m.get(), &d, nullptr, nullptr, nullptr));
        const std::vector<double> a(d, cmd.a), b(d, cmd.b);
        auto r = make<me_moments>([&](me_moments** out) { return me_rescale_moments(m.get(), a.data(), b.data(), out); });
        char* text = nullptr;
        check(me_moments_to_csv(r.get(), &text));
        deliver(cmd, "rescaled_moments.csv", take(text));
        break;
    }
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    Command cmd;
    try {
        cmd = moment_ensemble::cli::parse_args(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const moment_ensemble::cli::HelpRequested& h) {
        std::fputs(h.what(), stdout);
        return exit_ok;
    } catch (const moment_ensemble::cli::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    }
    try {
        return dispatch(cmd);
    } catch (const Failure& f) {
        std::fprintf(stderr, "%s: %s\n", me_status_name(f.status), f.message.c_str());
        return exit_code(f.status);
    }
}
