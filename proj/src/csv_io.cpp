#include "moment_ensemble/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

std::string format_number(long double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lg", value);
    return buf;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    for (auto& c : cells) {
        const auto first = c.find_first_not_of(" \t\r");
        const auto last = c.find_last_not_of(" \t\r");
        c = first == std::string::npos ? std::string{} : c.substr(first, last - first + 1);
    }
    return cells;
}

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line);
}

long double parse_cell(const std::string& cell, const std::string& column, const std::string& source,
                       std::size_t line) {
    const std::string at = where(source, line) + ", column " + column;
    if (cell.empty())
        throw ParseError(at + ": empty cell");
    char* end = nullptr;
    const long double v = std::strtold(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size())
        throw ParseError(at + ": malformed number '" + cell + "'");
    if (!std::isfinite(v))
        throw ParseError(at + ": non-finite value '" + cell + "'");
    return v;
}

unsigned parse_index(const std::string& cell, const std::string& column, const std::string& source,
                     std::size_t line) {
    const long double v = parse_cell(cell, column, source, line);
    if (v < 0 || v != std::floor(v) || v > 1e6)
        throw ParseError(where(source, line) + ", column " + column + ": expected a non-negative integer, got '" +
                         cell + "'");
    return static_cast<unsigned>(v);
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
};

Table read_table(std::istream& is, const std::string& source) {
    Table t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto cells = split_row(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError(where(source, n) + ": expected " + std::to_string(t.header.size()) + " columns, found " +
                             std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
        t.lines.push_back(n);
    }
    if (t.header.empty())
        throw ParseError(source + ": empty file");
    if (t.rows.empty())
        throw ParseError(source + ": no data rows");
    return t;
}

std::size_t count_prefixed(const std::vector<std::string>& header, std::size_t from, const std::string& prefix) {
    std::size_t n = 0;
    while (from + n < header.size() && header[from + n] == prefix + std::to_string(n + 1))
        ++n;
    return n;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    return in;
}

void write_moment_rows(std::ostream& os, const MomentSequence& m, const std::string& prefix) {
    const auto& set = m.index_set();
    for (std::size_t r = 0; r < m.index_count(); ++r) {
        const auto& k = set.at(r);
        std::string ks;
        for (std::size_t a = 0; a < k.size(); ++a)
            ks += std::to_string(k[a]) + ",";
        for (std::size_t i = 0; i < m.state_dim(); ++i)
            os << prefix << ks << (i + 1) << ',' << format_number(m.at_rank(r, i)) << '\n';
    }
}

void write_moment_header(std::ostream& os, std::size_t d, bool with_time) {
    if (with_time)
        os << "time,";
    for (std::size_t a = 0; a < d; ++a)
        os << "k_" << (a + 1) << ',';
    os << "state_i,value\n";
}

} // namespace

void write_moments_csv(std::ostream& os, const MomentSequence& m) {
    write_moment_header(os, m.index_dim(), false);
    write_moment_rows(os, m, {});
}

void write_moment_trace_csv(std::ostream& os, const std::vector<double>& times, const std::vector<MomentSequence>& m) {
    if (times.size() != m.size())
        throw InvalidArgument("moment trace has " + std::to_string(m.size()) + " samples for " +
                              std::to_string(times.size()) + " times");
    if (m.empty())
        return;
    write_moment_header(os, m.front().index_dim(), true);
    for (std::size_t s = 0; s < m.size(); ++s)
        write_moment_rows(os, m[s], format_number(times[s]) + ",");
}

MomentSequence read_moments_csv(std::istream& is, const std::string& source) {
    const Table t = read_table(is, source);
    const std::size_t d = count_prefixed(t.header, 0, "k_");
    if (d == 0 || t.header.size() != d + 2 || t.header[d] != "state_i" || t.header[d + 1] != "value")
        throw ParseError(where(source, 1) + ": expected header k_1,...,k_d,state_i,value");

    struct Entry {
        MultiIndex k;
        unsigned comp;
        long double value;
        std::size_t line;
    };
    std::vector<Entry> entries;
    unsigned order = 0, n = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        std::vector<unsigned> k(d);
        for (std::size_t a = 0; a < d; ++a)
            k[a] = parse_index(row[a], t.header[a], source, t.lines[r]);
        const unsigned comp = parse_index(row[d], "state_i", source, t.lines[r]);
        if (comp == 0)
            throw ParseError(where(source, t.lines[r]) + ", column state_i: components are numbered from 1");
        MultiIndex mi(std::move(k));
        order = std::max(order, mi.order());
        n = std::max(n, comp);
        entries.push_back({std::move(mi), comp - 1, parse_cell(row[d + 1], "value", source, t.lines[r]), t.lines[r]});
    }
    if (order > 200)
        throw ParseError(source + ": moment order " + std::to_string(order) + " is out of range");
    MomentSequence m(d, n, order);
    std::vector<char> seen(m.index_count() * n, 0);
    for (const auto& e : entries) {
        const std::size_t slot = m.index_set().rank(e.k) * n + e.comp;
        if (seen[slot])
            throw ParseError(where(source, e.line) + ": duplicate entry for k = " + e.k.to_string() + ", state_i = " +
                             std::to_string(e.comp + 1));
        seen[slot] = 1;
        m(e.k, e.comp) = static_cast<Real>(e.value);
    }
    for (std::size_t s = 0; s < seen.size(); ++s)
        if (!seen[s])
            throw ParseError(source + ": missing entry for k = " + m.index_set().at(s / n).to_string() +
                             ", state_i = " + std::to_string(s % n + 1));
    return m;
}

MomentSequence load_moments_csv(const std::string& path) {
    auto in = open_input(path);
    return read_moments_csv(in, path);
}

void write_profile_csv(std::ostream& os, const ParameterGrid& grid, const EnsembleProfile& profile) {
    for (std::size_t a = 0; a < grid.dim(); ++a)
        os << "beta_" << (a + 1) << ',';
    for (std::size_t i = 0; i < profile.state_dim(); ++i)
        os << "x_" << (i + 1) << (i + 1 == profile.state_dim() ? "\n" : ",");
    for (std::size_t p = 0; p < grid.size(); ++p) {
        for (double b : grid.node(p))
            os << format_number(b) << ',';
        const auto x = profile.state(p);
        for (std::size_t i = 0; i < x.size(); ++i)
            os << format_number(x[i]) << (i + 1 == x.size() ? "\n" : ",");
    }
}

std::pair<ParameterGrid, EnsembleProfile> read_profile_csv(std::istream& is, const std::string& source) {
    const Table t = read_table(is, source);
    const std::size_t d = count_prefixed(t.header, 0, "beta_");
    const std::size_t n = count_prefixed(t.header, d, "x_");
    if (d == 0 || n == 0 || d + n != t.header.size())
        throw ParseError(where(source, 1) + ": expected header beta_1..beta_d,x_1..x_n");

    const std::size_t P = t.rows.size();
    std::vector<double> betas(P * d), states(P * n);
    for (std::size_t r = 0; r < P; ++r) {
        for (std::size_t c = 0; c < d + n; ++c) {
            const double v = static_cast<double>(parse_cell(t.rows[r][c], t.header[c], source, t.lines[r]));
            (c < d ? betas[r * d + c] : states[r * n + c - d]) = v;
        }
    }

    std::vector<Interval> bounds(d);
    std::vector<std::size_t> points(d);
    for (std::size_t a = 0; a < d; ++a) {
        std::vector<double> axis;
        for (std::size_t r = 0; r < P; ++r)
            axis.push_back(betas[r * d + a]);
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
        points[a] = axis.size();
        if (axis.size() == 1)
            throw ParseError(source + ": column beta_" + std::to_string(a + 1) +
                             " has a single value, the grid spacing cannot be inferred");
        const double h = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
        for (std::size_t j = 1; j < axis.size(); ++j)
            if (std::abs(axis[j] - axis[j - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
                throw ParseError(source + ": column beta_" + std::to_string(a + 1) + " is not uniformly spaced");
        bounds[a] = {axis.front() - h / 2, axis.back() + h / 2};
    }
    std::size_t expected = 1;
    for (auto c : points)
        expected *= c;
    if (expected != P)
        throw ParseError(source + ": " + std::to_string(P) + " rows do not form a tensor grid of " +
                         std::to_string(expected) + " nodes");
    ParameterGrid grid = ParameterGrid::uniform_midpoint(bounds, points);
    for (std::size_t r = 0; r < P; ++r) {
        const auto node = grid.node(r);
        for (std::size_t a = 0; a < d; ++a) {
            const double h = bounds[a].length() / static_cast<double>(points[a]);
            if (std::abs(node[a] - betas[r * d + a]) > 1e-9 * std::max(1.0, h) + 1e-6 * h)
                throw ParseError(where(source, t.lines[r]) + ", column beta_" + std::to_string(a + 1) +
                                 ": β columns are not monotone in grid order");
        }
    }
    EnsembleProfile profile(P, n, std::move(states));
    return {std::move(grid), std::move(profile)};
}

std::pair<ParameterGrid, EnsembleProfile> load_profile_csv(const std::string& path) {
    auto in = open_input(path);
    return read_profile_csv(in, path);
}

void write_trajectory_csv(std::ostream& os, const ScenarioResult& r) {
    const std::size_t d = r.grid.dim();
    const std::size_t n = r.profiles.empty() ? 0 : r.profiles.front().state_dim();
    os << "time,node_index";
    for (std::size_t a = 0; a < d; ++a)
        os << ",beta_" << (a + 1);
    for (std::size_t i = 0; i < n; ++i)
        os << ",x_" << (i + 1);
    for (std::size_t l = 0; l < r.control_names.size(); ++l)
        os << ",u_" << (l + 1);
    os << '\n';
    for (std::size_t s = 0; s < r.profiles.size(); ++s) {
        const std::string t = format_number(r.times[s]);
        std::string u;
        if (s < r.controls.size())
            for (double c : r.controls[s])
                u += "," + format_number(c);
        for (std::size_t p = 0; p < r.grid.size(); ++p) {
            os << t << ',' << p;
            for (double b : r.grid.node(p))
                os << ',' << format_number(b);
            for (double x : r.profiles[s].state(p))
                os << ',' << format_number(x);
            os << u << '\n';
        }
    }
}

std::vector<std::string> emit_csv(const ScenarioResult& r, const std::string& dir, const std::string& config_json) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory '" + dir + "'" + (ec ? ": " + ec.message() : std::string{}));

    std::vector<std::string> written;
    const auto write = [&](const std::string& name, auto&& body) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        body(out);
        out.flush();
        if (!out)
            throw IoError("write to '" + path + "' failed");
        written.push_back(path);
    };

    if (r.scenario == "output_moment_demo") {
        write("profiles.csv", [&](std::ostream& os) {
            os << "profile,";
            std::ostringstream a, b;
            write_profile_csv(a, r.grid, r.profiles.at(0));
            write_profile_csv(b, r.grid, r.profiles.at(1));
            std::istringstream ia(a.str()), ib(b.str());
            std::string line;
            std::getline(ia, line);
            std::getline(ib, line);
            os << line << '\n';
            while (std::getline(ia, line))
                os << "initial," << line << '\n';
            while (std::getline(ib, line))
                os << "target," << line << '\n';
        });
        write("output_moments_initial.csv", [&](std::ostream& os) { write_moments_csv(os, r.moments.at(0)); });
        write("output_moments_target.csv", [&](std::ostream& os) { write_moments_csv(os, r.moments.at(1)); });
    } else {
        write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, r); });
        write("moments.csv", [&](std::ostream& os) { write_moment_trace_csv(os, r.times, r.moments); });
        if (!r.model_moments.empty())
            write(r.model_moments_label + ".csv",
                  [&](std::ostream& os) { write_moment_trace_csv(os, r.times, r.model_moments); });
        write("controls.csv", [&](std::ostream& os) {
            os << "time";
            for (std::size_t l = 0; l < r.control_names.size(); ++l)
                os << ",u_" << (l + 1);
            os << '\n';
            for (std::size_t s = 0; s < r.controls.size(); ++s) {
                os << format_number(r.times[s]);
                for (double c : r.controls[s])
                    os << ',' << format_number(c);
                os << '\n';
            }
        });
        write("lyapunov.csv", [&](std::ostream& os) {
            os << "time,V\n";
            for (std::size_t s = 0; s < r.lyapunov.size(); ++s)
                os << format_number(r.times[s]) << ',' << format_number(r.lyapunov[s]) << '\n';
        });
    }
    write("report.txt", [&](std::ostream& os) {
        for (const auto& line : r.report)
            os << line << '\n';
    });

    nlohmann::ordered_json manifest;
    manifest["name"] = r.name;
    manifest["scenario"] = r.scenario;
    manifest["controls"] = r.control_names;
    auto& files = manifest["files"] = nlohmann::ordered_json::array();
    for (const auto& p : written)
        files.push_back(fs::path(p).filename().string());
    auto& metrics = manifest["metrics"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metrics)
        metrics[k] = format_number(v);
    if (!config_json.empty())
        manifest["config"] = nlohmann::ordered_json::parse(config_json);
    write("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
    return written;
}

} // namespace moment_ensemble
