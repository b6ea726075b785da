#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "moment_ensemble/moment_ensemble.h"

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    me_string_free(s);
    return out;
}

} // namespace

TEST_SUITE("c_api") {

TEST_CASE("moments from a profile") {
    const double lo[] = {0.0}, hi[] = {1.0};
    const size_t pts[] = {1000};
    me_profile* p = nullptr;
    REQUIRE(me_profile_create_uniform(1, lo, hi, pts, 1, nullptr, &p) == ME_OK);
    size_t dim = 0, nodes = 0, n = 0;
    CHECK(me_profile_shape(p, &dim, &nodes, &n) == ME_OK);
    CHECK(nodes == 1000);

    me_moments* m = nullptr;
    REQUIRE(me_compute_moments(p, 4, 0, &m) == ME_OK);
    unsigned order = 0;
    size_t count = 0;
    CHECK(me_moments_shape(m, nullptr, nullptr, &order, &count) == ME_OK);
    CHECK(order == 4);
    CHECK(count == 5);
    const unsigned k[] = {2};
    double v = -1;
    CHECK(me_moments_get(m, k, 0, &v) == ME_OK);
    CHECK(v == 0.0);
    CHECK(me_moments_get(m, k, 1, &v) == ME_ERR_INVALID_ARGUMENT);
    CHECK(std::string(me_last_error()).find("component") != std::string::npos);
    me_moments_free(m);
    me_profile_free(p);
}

TEST_CASE("null handles and status names") {
    me_moments* m = nullptr;
    CHECK(me_moments_load_csv(nullptr, &m) == ME_ERR_INVALID_ARGUMENT);
    CHECK(me_moments_load_csv("/nonexistent.csv", &m) == ME_ERR_IO);
    CHECK(m == nullptr);
    CHECK(std::string(me_status_name(ME_ERR_NUMERICAL)) == "numerical failure");
    CHECK(std::strlen(me_version()) > 0);
    me_moments_free(nullptr);
}

TEST_CASE("rescale, radical distance and Hausdorff through the C surface") {
    me_moments* unit = nullptr;
    REQUIRE(me_moments_create(1, 1, 3, &unit) == ME_OK);
    for (unsigned k = 0; k <= 3; ++k) {
        const unsigned idx[] = {k};
        REQUIRE(me_moments_set(unit, idx, 0, 1.0 / (k + 1)) == ME_OK);
    }
    const double a[] = {1.1}, b[] = {0.9};
    me_moments* out = nullptr;
    CHECK(me_rescale_moments(unit, a, b, &out) == ME_ERR_INVALID_ARGUMENT);
    CHECK(std::string(me_last_error()).find("b must exceed a") != std::string::npos);
    CHECK(me_rescale_moments(unit, b, a, &out) == ME_OK);
    const unsigned one[] = {1};
    double mean = 0;
    CHECK(me_moments_get(out, one, 0, &mean) == ME_OK);
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-15));

    double dist = -1;
    CHECK(me_radical_distance(unit, unit, &dist) == ME_OK);
    CHECK(dist == 0.0);
    CHECK(me_radical_distance(unit, nullptr, &dist) == ME_ERR_INVALID_ARGUMENT);

    double c = 0;
    char* report = nullptr;
    CHECK(me_check_hausdorff(unit, 3, ME_NORM_L1, &c, &report) == ME_OK);
    CHECK(c == doctest::Approx(1.0));
    CHECK(take(report).rfind("n,state_i,value\n", 0) == 0);
    CHECK(me_check_hausdorff(unit, 4, ME_NORM_L2, &c, nullptr) == ME_ERR_INVALID_ARGUMENT);

    me_profile* density = nullptr;
    CHECK(me_invert_moments(unit, 3, &density) == ME_OK);
    double x = 0;
    CHECK(me_profile_state(density, 2, &x) == ME_OK);
    CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(me_profile_state(density, 4, &x) == ME_ERR_INVALID_ARGUMENT);
    me_profile_free(density);
    me_moments_free(out);
    me_moments_free(unit);
}

TEST_CASE("csv text round trip") {
    me_moments* m = nullptr;
    REQUIRE(me_moments_parse_csv("k_1,state_i,value\n0,1,1\n1,1,0.5\n", &m) == ME_OK);
    char* text = nullptr;
    REQUIRE(me_moments_to_csv(m, &text) == ME_OK);
    CHECK(take(text) == "k_1,state_i,value\n0,1,1\n1,1,0.5\n");
    me_moments_free(m);
    CHECK(me_moments_parse_csv("k_1,state_i,value\n0,1,zz\n", &m) == ME_ERR_PARSE);
}

TEST_CASE("configs and runs") {
    char* names = nullptr;
    REQUIRE(me_preset_names(&names) == ME_OK);
    CHECK(take(names) == "bloch-paper\nnonlinear-paper\noutput-moment-demo\n");

    me_config* cfg = nullptr;
    CHECK(me_config_from_preset("nope", &cfg) == ME_ERR_INVALID_ARGUMENT);
    REQUIRE(me_config_resolve("output-moment-demo", &cfg) == ME_OK);
    CHECK(me_config_set(cfg, "grid_points", "200") == ME_OK);
    CHECK(me_config_set(cfg, "grid_points", "-3") != ME_OK);
    char* value = nullptr;
    REQUIRE(me_config_get(cfg, "grid_points", &value) == ME_OK);
    CHECK(take(value) == "200");

    me_result* r = nullptr;
    REQUIRE(me_run(cfg, &r) == ME_OK);
    double dist = -1;
    CHECK(me_result_metric(r, "radical_distance", &dist) == ME_OK);
    CHECK(dist == 0.0);
    CHECK(me_result_metric(r, "nope", &dist) == ME_ERR_INVALID_ARGUMENT);
    char* metric_names = nullptr;
    REQUIRE(me_result_metric_names(r, &metric_names) == ME_OK);
    CHECK(take(metric_names).find("l2_distance") != std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "moment_ensemble_capi";
    std::filesystem::remove_all(dir);
    char* paths = nullptr;
    REQUIRE(me_result_write(r, dir.string().c_str(), &paths) == ME_OK);
    CHECK(take(paths).find("manifest.json") != std::string::npos);
    CHECK(me_result_write(r, "/proc/forbidden_dir", nullptr) == ME_ERR_IO);
    me_result_free(r);

    CHECK(me_config_set(cfg, "T", "1e300") == ME_OK);
    CHECK(me_config_set(cfg, "scenario", "bloch") == ME_OK);
    me_config_free(cfg);
}

TEST_CASE("numerical failures surface as status codes") {
    me_config* cfg = nullptr;
    REQUIRE(me_config_from_preset("bloch-paper", &cfg) == ME_OK);
    REQUIRE(me_config_set(cfg, "initial_profile.value", "[0, 1, 0]") == ME_OK);
    REQUIRE(me_config_set(cfg, "grid_points", "10") == ME_OK);
    me_result* r = nullptr;
    CHECK(me_run(cfg, &r) == ME_ERR_NUMERICAL);
    CHECK(std::string(me_last_error()).find("stall") != std::string::npos);
    me_config_free(cfg);
}

}
