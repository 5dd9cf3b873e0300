#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "jigclu.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

jigclu_context* open_with(const std::vector<std::string>& sets, jigclu_status expect,
                          std::string* err_out = nullptr) {
    std::vector<const char*> ptrs;
    for (const auto& s : sets) ptrs.push_back(s.c_str());
    jigclu_context* ctx = nullptr;
    char err[512] = {0};
    auto status =
        jigclu_context_open(nullptr, ptrs.data(), ptrs.size(), &ctx, err, sizeof(err));
    CHECK(status == expect);
    if (err_out) *err_out = err;
    return ctx;
}

} // namespace

TEST_CASE("capi: version and config hash") {
    CHECK(std::strlen(jigclu_version()) > 0);
    auto* ctx = open_with({"dataset.format=synthetic"}, JIGCLU_OK);
    REQUIRE(ctx != nullptr);
    CHECK(std::strlen(jigclu_config_hash(ctx)) == 64);
    jigclu_context_close(ctx);
}

TEST_CASE("capi: config errors carry status 2 and a message") {
    std::string err;
    auto* ctx = open_with({"task.m=1"}, JIGCLU_CONFIG_ERROR, &err);
    CHECK(ctx == nullptr);
    CHECK(err.find("task.m") != std::string::npos);

    ctx = open_with({"bogus.key=1"}, JIGCLU_CONFIG_ERROR, &err);
    CHECK(ctx == nullptr);

    // unreadable config file
    jigclu_context* ctx2 = nullptr;
    char buf[256] = {0};
    auto status = jigclu_context_open("/nonexistent/config.json", nullptr, 0, &ctx2, buf,
                                      sizeof(buf));
    CHECK(status == JIGCLU_CONFIG_ERROR);
}

TEST_CASE("capi: data errors carry status 3") {
    TempDir dir("jigclu_capi_data");
    auto* ctx = open_with({"dataset.format=cifar10",
                           "dataset.path=/nonexistent/cifar",
                           std::string("io.out_dir=") + (dir.path / "out").string()},
                          JIGCLU_OK);
    REQUIRE(ctx != nullptr);
    char final_path[512] = {0};
    auto status = jigclu_pretrain(ctx, nullptr, final_path, sizeof(final_path));
    CHECK(status == JIGCLU_DATA_ERROR);
    CHECK(std::strlen(jigclu_error(ctx)) > 0);
    jigclu_context_close(ctx);
}

TEST_CASE("capi: inspect-batch writes the dump contract") {
    TempDir dir("jigclu_capi_inspect");
    auto* ctx = open_with({"dataset.format=synthetic", "optim.batch_size=4",
                           std::string("io.out_dir=") + (dir.path / "out").string()},
                          JIGCLU_OK);
    REQUIRE(ctx != nullptr);
    CHECK(jigclu_inspect_batch(ctx, 7) == JIGCLU_OK);

    for (int j = 0; j < 4; ++j)
        CHECK(fs::exists(dir.path / "out" / ("montage_" + std::to_string(j) + ".png")));
    CHECK_FALSE(fs::exists(dir.path / "out" / "montage_4.png"));

    std::ifstream f(dir.path / "out" / "labels.json");
    REQUIRE(f.good());
    nlohmann::json sidecar;
    f >> sidecar;
    CHECK(sidecar.at("batch_seed").get<uint64_t>() == 7);
    CHECK(sidecar.at("permutation").size() == 16);
    CHECK(sidecar.at("cluster_ids").size() == 16);
    CHECK(sidecar.at("location_ids").size() == 16);
    CHECK(sidecar.at("grid").at("m").get<int>() == 2);
    CHECK(sidecar.at("config_hash").get<std::string>() ==
          std::string(jigclu_config_hash(ctx)));
    jigclu_context_close(ctx);
}

TEST_CASE("capi: pretrain runs end to end and reports the checkpoint path") {
    TempDir dir("jigclu_capi_pretrain");
    auto* ctx = open_with({"dataset.format=synthetic", "optim.batch_size=8",
                           "optim.epochs=1", "model.backbone=toy_c8_s4",
                           std::string("io.out_dir=") + (dir.path / "out").string()},
                          JIGCLU_OK);
    REQUIRE(ctx != nullptr);
    char final_path[512] = {0};
    REQUIRE(jigclu_pretrain(ctx, nullptr, final_path, sizeof(final_path)) == JIGCLU_OK);
    CHECK(fs::exists(final_path));

    char report[4096] = {0};
    REQUIRE(jigclu_linear_eval(ctx, final_path, report, sizeof(report)) == JIGCLU_OK);
    auto j = nlohmann::json::parse(report);
    CHECK(j.at("mode") == "linear");
    CHECK(j.at("top1").get<double>() >= 0.0);
    CHECK(fs::exists(dir.path / "out" / "report_linear.json"));

    // missing checkpoint argument is a config error
    CHECK(jigclu_linear_eval(ctx, "", nullptr, 0) == JIGCLU_CONFIG_ERROR);
    jigclu_context_close(ctx);
}
