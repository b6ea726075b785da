#include "moment_ensemble/moment_ensemble.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "moment_ensemble/csv_io.hpp"
#include "moment_ensemble/errors.hpp"
#include "moment_ensemble/moments.hpp"
#include "moment_ensemble/scenarios.hpp"

using namespace moment_ensemble;

struct me_moments {
    MomentSequence value;
};
struct me_profile {
    ParameterGrid grid;
    EnsembleProfile profile;
};
struct me_config {
    ScenarioConfig value;
};
struct me_result {
    ScenarioResult value;
    std::string config_json;
};

namespace {

thread_local std::string last_error;

me_status status_of(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return ME_ERR_INVALID_ARGUMENT;
    case ErrorKind::numerical: return ME_ERR_NUMERICAL;
    case ErrorKind::io: return ME_ERR_IO;
    case ErrorKind::parse: return ME_ERR_PARSE;
    }
    return ME_ERR_INTERNAL;
}

template <class F>
me_status guarded(F&& f) {
    last_error.clear();
    try {
        f();
        return ME_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return ME_ERR_INTERNAL;
}

template <class T>
void require(const T* p, const char* what) {
    if (p == nullptr)
        throw InvalidArgument(std::string(what) + " is null");
}

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

MultiIndex index_of(const me_moments* m, const unsigned* k) {
    require(k, "k");
    return MultiIndex(std::vector<unsigned>(k, k + m->value.index_dim()));
}

void check_component(const me_moments* m, size_t component) {
    if (component >= m->value.state_dim())
        throw InvalidArgument("component " + std::to_string(component) + " out of range (state dimension " +
                              std::to_string(m->value.state_dim()) + ")");
}

void check_node(const me_profile* p, size_t node) {
    if (node >= p->grid.size())
        throw InvalidArgument("node " + std::to_string(node) + " out of range (" + std::to_string(p->grid.size()) +
                              " nodes)");
}

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines)
        out += l + "\n";
    return out;
}

} // namespace

extern "C" {

const char* me_version(void) { return MOMENT_ENSEMBLE_VERSION; }

const char* me_last_error(void) { return last_error.c_str(); }

const char* me_status_name(me_status status) {
    switch (status) {
    case ME_OK: return "ok";
    case ME_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ME_ERR_NUMERICAL: return "numerical failure";
    case ME_ERR_IO: return "io error";
    case ME_ERR_PARSE: return "parse error";
    case ME_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void me_string_free(char* text) { std::free(text); }

me_status me_moments_create(size_t index_dim, size_t state_dim, unsigned max_order, me_moments** out) {
    return guarded([&] {
        require(out, "out");
        *out = new me_moments{MomentSequence(index_dim, state_dim, max_order)};
    });
}

me_status me_moments_load_csv(const char* path, me_moments** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new me_moments{load_moments_csv(path)};
    });
}

me_status me_moments_parse_csv(const char* text, me_moments** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        std::istringstream in(text);
        *out = new me_moments{read_moments_csv(in)};
    });
}

me_status me_moments_save_csv(const me_moments* m, const char* path) {
    return guarded([&] {
        require(m, "moments");
        require(path, "path");
        std::ofstream out(path);
        if (!out)
            throw IoError(std::string("cannot open '") + path + "' for writing");
        write_moments_csv(out, m->value);
        if (!out.flush())
            throw IoError(std::string("write to '") + path + "' failed");
    });
}

me_status me_moments_to_csv(const me_moments* m, char** text) {
    return guarded([&] {
        require(m, "moments");
        require(text, "text");
        std::ostringstream os;
        write_moments_csv(os, m->value);
        *text = duplicate(os.str());
    });
}

me_status me_moments_shape(const me_moments* m, size_t* index_dim, size_t* state_dim, unsigned* max_order,
                           size_t* index_count) {
    return guarded([&] {
        require(m, "moments");
        if (index_dim) *index_dim = m->value.index_dim();
        if (state_dim) *state_dim = m->value.state_dim();
        if (max_order) *max_order = m->value.max_order();
        if (index_count) *index_count = m->value.index_count();
    });
}

me_status me_moments_get(const me_moments* m, const unsigned* k, size_t component, double* value) {
    return guarded([&] {
        require(m, "moments");
        require(value, "value");
        check_component(m, component);
        *value = static_cast<double>(m->value(index_of(m, k), component));
    });
}

me_status me_moments_set(me_moments* m, const unsigned* k, size_t component, double value) {
    return guarded([&] {
        require(m, "moments");
        check_component(m, component);
        m->value(index_of(m, k), component) = value;
    });
}

void me_moments_free(me_moments* m) { delete m; }

me_status me_profile_create_uniform(size_t dim, const double* lower, const double* upper, const size_t* points,
                                    size_t state_dim, const double* states, me_profile** out) {
    return guarded([&] {
        require(lower, "lower");
        require(upper, "upper");
        require(points, "points");
        require(out, "out");
        std::vector<Interval> bounds;
        for (size_t j = 0; j < dim; ++j)
            bounds.push_back({lower[j], upper[j]});
        auto grid = ParameterGrid::uniform_midpoint(bounds, std::vector<std::size_t>(points, points + dim));
        std::vector<double> values(grid.size() * state_dim, 0.0);
        if (states)
            std::copy(states, states + values.size(), values.begin());
        EnsembleProfile profile(grid.size(), state_dim, std::move(values));
        *out = new me_profile{std::move(grid), std::move(profile)};
    });
}

me_status me_profile_load_csv(const char* path, me_profile** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        auto [grid, profile] = load_profile_csv(path);
        *out = new me_profile{std::move(grid), std::move(profile)};
    });
}

me_status me_profile_to_csv(const me_profile* p, char** text) {
    return guarded([&] {
        require(p, "profile");
        require(text, "text");
        std::ostringstream os;
        write_profile_csv(os, p->grid, p->profile);
        *text = duplicate(os.str());
    });
}

me_status me_profile_shape(const me_profile* p, size_t* dim, size_t* nodes, size_t* state_dim) {
    return guarded([&] {
        require(p, "profile");
        if (dim) *dim = p->grid.dim();
        if (nodes) *nodes = p->grid.size();
        if (state_dim) *state_dim = p->profile.state_dim();
    });
}

me_status me_profile_node(const me_profile* p, size_t node, double* beta) {
    return guarded([&] {
        require(p, "profile");
        require(beta, "beta");
        check_node(p, node);
        const auto b = p->grid.node(node);
        std::copy(b.begin(), b.end(), beta);
    });
}

me_status me_profile_state(const me_profile* p, size_t node, double* x) {
    return guarded([&] {
        require(p, "profile");
        require(x, "x");
        check_node(p, node);
        const auto s = p->profile.state(node);
        std::copy(s.begin(), s.end(), x);
    });
}

void me_profile_free(me_profile* p) { delete p; }

me_status me_compute_moments(const me_profile* p, unsigned order, int output_moments, me_moments** out) {
    return guarded([&] {
        require(p, "profile");
        require(out, "out");
        *out = new me_moments{output_moments ? compute_output_moments(p->profile, p->grid, order)
                                             : compute_ensemble_moments(p->profile, p->grid, order)};
    });
}

me_status me_check_hausdorff(const me_moments* m, unsigned up_to, me_norm norm, double* max_value, char** report) {
    return guarded([&] {
        require(m, "moments");
        if (norm != ME_NORM_L1 && norm != ME_NORM_L2)
            throw InvalidArgument("unknown norm " + std::to_string(static_cast<int>(norm)));
        const auto r = check_hausdorff(m->value, up_to, norm == ME_NORM_L1 ? HausdorffNorm::l1 : HausdorffNorm::l2);
        if (max_value)
            *max_value = static_cast<double>(r.max_value);
        if (report) {
            std::ostringstream os;
            os << "n,state_i,value\n";
            for (const auto& t : r.per_n)
                os << '"' << t.n.to_string() << "\"," << (t.component + 1) << ',' << format_number(t.value) << '\n';
            *report = duplicate(os.str());
        }
    });
}

me_status me_invert_moments(const me_moments* m, unsigned n_grid, me_profile** out) {
    return guarded([&] {
        require(m, "moments");
        require(out, "out");
        auto inv = invert_moments(m->value, n_grid);
        *out = new me_profile{std::move(inv.lattice), std::move(inv.density)};
    });
}

me_status me_rescale_moments(const me_moments* unit, const double* a, const double* b, me_moments** out) {
    return guarded([&] {
        require(unit, "moments");
        require(a, "a");
        require(b, "b");
        require(out, "out");
        std::vector<Interval> box;
        for (size_t j = 0; j < unit->value.index_dim(); ++j)
            box.push_back({a[j], b[j]});
        *out = new me_moments{rescale_moments(unit->value, box)};
    });
}

me_status me_radical_distance(const me_moments* m, const me_moments* n, double* distance) {
    return guarded([&] {
        require(m, "m");
        require(n, "n");
        require(distance, "distance");
        *distance = static_cast<double>(radical_distance(m->value, n->value));
    });
}

me_status me_preset_names(char** names) {
    return guarded([&] {
        require(names, "names");
        *names = duplicate(join(preset_names()));
    });
}

me_status me_config_from_preset(const char* name, me_config** out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        *out = new me_config{preset(name)};
    });
}

me_status me_config_load_file(const char* path, me_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new me_config{load_config_file(path)};
    });
}

me_status me_config_resolve(const char* preset_or_path, me_config** out) {
    return guarded([&] {
        require(preset_or_path, "preset_or_path");
        require(out, "out");
        const std::string s = preset_or_path;
        for (const auto& name : preset_names())
            if (name == s) {
                *out = new me_config{preset(s)};
                return;
            }
        *out = new me_config{load_config_file(s)};
    });
}

me_status me_config_set(me_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        require(cfg, "config");
        require(key, "key");
        require(value, "value");
        set_config_value(cfg->value, key, value);
    });
}

me_status me_config_get(const me_config* cfg, const char* key, char** value) {
    return guarded([&] {
        require(cfg, "config");
        require(key, "key");
        require(value, "value");
        *value = duplicate(get_config_value(cfg->value, key));
    });
}

me_status me_config_to_json(const me_config* cfg, char** json) {
    return guarded([&] {
        require(cfg, "config");
        require(json, "json");
        *json = duplicate(serialize_config(cfg->value));
    });
}

void me_config_free(me_config* cfg) { delete cfg; }

me_status me_run(const me_config* cfg, me_result** out) {
    return guarded([&] {
        require(cfg, "config");
        require(out, "out");
        *out = new me_result{run_scenario(cfg->value), serialize_config(cfg->value)};
    });
}

me_status me_result_metric(const me_result* r, const char* key, double* value) {
    return guarded([&] {
        require(r, "result");
        require(key, "key");
        require(value, "value");
        const auto it = r->value.metrics.find(key);
        if (it == r->value.metrics.end())
            throw InvalidArgument(std::string("no metric named '") + key + "'");
        *value = it->second;
    });
}

me_status me_result_metric_names(const me_result* r, char** names) {
    return guarded([&] {
        require(r, "result");
        require(names, "names");
        std::vector<std::string> keys;
        for (const auto& kv : r->value.metrics)
            keys.push_back(kv.first);
        *names = duplicate(join(keys));
    });
}

me_status me_result_report(const me_result* r, char** text) {
    return guarded([&] {
        require(r, "result");
        require(text, "text");
        *text = duplicate(join(r->value.report));
    });
}

me_status me_result_sample_count(const me_result* r, size_t* count) {
    return guarded([&] {
        require(r, "result");
        require(count, "count");
        *count = r->value.times.size();
    });
}

me_status me_result_write(const me_result* r, const char* dir, char** paths) {
    return guarded([&] {
        require(r, "result");
        require(dir, "dir");
        const auto written = emit_csv(r->value, dir, r->config_json);
        if (paths)
            *paths = duplicate(join(written));
    });
}

void me_result_free(me_result* r) { delete r; }

} // extern "C"
