#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "json.hpp"
#include "reichlab/io.hpp"
#include "run_config.hpp"

namespace {

using namespace reichlab::cli;
using nlohmann::json;
namespace fs = std::filesystem;

class CliRuns : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("reichlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunConfig small(const fs::path& out, long window = 4) const {
        RunConfig c = parse_config(R"({"n_list": [4, 8], "k_list": [100, 200], "sum_points": 5})");
        c.window_size = window;
        c.out_dir = out;
        validate(c);
        return c;
    }
    static json read_json(const fs::path& p) { return json::parse(reichlab::io::read_text(p)); }

    fs::path dir_;
};

TEST(ParseConfig, DefaultFileMatchesBuiltInDefaults) {
    const RunConfig file = load_config(REICHLAB_DEFAULT_CONFIG);
    RunConfig built;
    validate(built);
    EXPECT_EQ(file.window_size, built.window_size);
    EXPECT_EQ(file.tol, built.tol);
    EXPECT_EQ(file.n_list, built.n_list);
    EXPECT_EQ(file.k_list, built.k_list);
    EXPECT_EQ(file.model.kind, built.model.kind);
    EXPECT_EQ(file.model.window, built.model.window);
    EXPECT_EQ(file.kernel_depth, built.kernel_depth);
    EXPECT_EQ(file.out_dir, built.out_dir);
}

TEST(ParseConfig, OverridesAndNestedKeys) {
    const auto c = parse_config(R"({"model": {"kind": "gamma2-quotient", "word_depth": 4},
                                    "lattice": {"window": 3, "delta": 0.1, "seed": 9},
                                    "kernel": {"group": "cyclic", "depth": 5}, "sum_radius": 2.5})");
    EXPECT_EQ(c.model.kind, reichlab::partition::ModelKind::gamma2_quotient);
    EXPECT_EQ(c.model.word_depth, 4);
    EXPECT_EQ(c.model.window, reichlab::lattice::centered_window(3));
    EXPECT_EQ(c.model.delta, 0.1);
    EXPECT_EQ(c.model.seed, 9u);
    EXPECT_EQ(c.kernel_group, GroupKind::cyclic);
    EXPECT_EQ(c.kernel_depth, 5);
    ASSERT_TRUE(c.sum_radius.has_value());
    EXPECT_EQ(*c.sum_radius, 2.5);
}

TEST(ParseConfig, RejectsUnknownKeysAndBadValues) {
    for (const char* bad : {
             R"({"tolerance": 1e-8})",
             R"({"model": {"shape": "disk"}})",
             R"({"model": {"kind": "torus"}})",
             R"({"kernel": {"group": "modular"}})",
             R"({"tol": -1})",
             R"({"tol": "small"})",
             R"({"n_list": []})",
             R"({"n_list": [8, 4]})",
             R"({"k_list": [50]})",
             R"({"lattice": {"window": 0}})",
             R"({"lattice": {"delta": 0.2}})",
             R"({"model": {"puncture_radius": 0.125}})",
             R"({"kernel": {"depth": 13}})",
             R"([1, 2])",
             R"({"tol": )",
         }) {
        EXPECT_THROW(parse_config(bad), ConfigError) << bad;
    }
    EXPECT_THROW(load_config("/nonexistent/reichlab.json"), ConfigError);
}

TEST_F(CliRuns, BuildThenAuditOnASmallWindow) {
    const auto config = small(dir_ / "run");
    std::ostringstream log;
    ASSERT_EQ(run_guarded(cmd_partition_build, config, log), kPass) << log.str();
    const auto atoms = reichlab::io::read_atoms_csv(dir_ / "run" / "atoms.csv");
    EXPECT_EQ(atoms.size(), 16u);
    const auto partition = read_json(dir_ / "run" / "partition_report.json");
    EXPECT_EQ(partition["command"], "partition-build");
    EXPECT_TRUE(partition["passed"].get<bool>());
    EXPECT_EQ(partition["decay_audit"]["violations"], 0);

    const int status = run_guarded(cmd_reich_audit, config, log);
    const auto report = read_json(dir_ / "run" / "report.json");
    EXPECT_EQ(status, report["passed"].get<bool>() ? kPass : kContractFailure);
    EXPECT_EQ(report["n_values"], json({4, 8}));
    EXPECT_TRUE(fs::exists(dir_ / "run" / "condition2.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "run" / "condition3.csv"));
    EXPECT_EQ(report["condition1"]["rows"].size(), 2u);
}

TEST_F(CliRuns, ReportsAreByteIdenticalAcrossRuns) {
    std::ostringstream log;
    for (const char* name : {"a", "b"}) {
        const auto config = small(dir_ / name, 3);
        run_guarded(cmd_partition_build, config, log);
        run_guarded(cmd_reich_audit, config, log);
    }
    for (const char* file : {"atoms.csv", "partition_report.json", "report.json", "condition2.csv", "condition3.csv"}) {
        EXPECT_EQ(reichlab::io::read_text(dir_ / "a" / file), reichlab::io::read_text(dir_ / "b" / file)) << file;
    }
}

TEST_F(CliRuns, SmallNIsFlaggedBelowTheThreshold) {
    auto config = small(dir_ / "run", 3);
    config.n_list = {1};
    std::ostringstream log;
    run_guarded(cmd_partition_build, config, log);
    run_guarded(cmd_reich_audit, config, log);
    const auto report = read_json(dir_ / "run" / "report.json");
    ASSERT_GE(report["constants"]["n_threshold"].get<double>(), 1.0);
    bool flagged = false;
    for (const auto& w : report["warnings"]) {
        flagged = flagged || w.get<std::string>().find("n = 1 ") != std::string::npos;
    }
    EXPECT_TRUE(flagged);
    EXPECT_NE(log.str().find("warning:"), std::string::npos);
}

TEST_F(CliRuns, Condition3BoundHalvesWhenKDoubles) {
    const auto config = small(dir_ / "run", 4);
    std::ostringstream log;
    run_guarded(cmd_partition_build, config, log);
    run_guarded(cmd_reich_audit, config, log);
    const auto rows = read_json(dir_ / "run" / "report.json")["condition3"]["rows"];
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        EXPECT_EQ(rows[i]["K"], 100.0);
        EXPECT_EQ(rows[i + 1]["K"], 200.0);
        EXPECT_NEAR(rows[i + 1]["bound"].get<double>(), 0.5 * rows[i]["bound"].get<double>(),
                    1e-12 * rows[i]["bound"].get<double>());
        EXPECT_LE(rows[i + 1]["total"].get<double>(), rows[i]["total"].get<double>());
    }
}

TEST_F(CliRuns, SingleCellWindow) {
    const auto config = small(dir_ / "run", 1);
    std::ostringstream log;
    run_guarded(cmd_partition_build, config, log);
    const auto atoms = reichlab::io::read_atoms_csv(dir_ / "run" / "atoms.csv");
    ASSERT_EQ(atoms.size(), 1u);
    EXPECT_EQ(atoms[0].k, 0);
    EXPECT_EQ(atoms[0].l, 0);
    EXPECT_GT(atoms[0].decay_C, 0.0);
    // The lone atom is the projection of the whole inscribed disk, which is 1.
    EXPECT_NEAR(std::abs(atoms[0].sample_value - 1.0), 0.0, 1e-7);
}

TEST_F(CliRuns, AuditRejectsAMismatchedAtomTable) {
    std::ostringstream log;
    run_guarded(cmd_partition_build, small(dir_ / "run", 3), log);
    EXPECT_EQ(run_guarded(cmd_reich_audit, small(dir_ / "run", 4), log), kConfigError);
    EXPECT_EQ(run_guarded(cmd_reich_audit, small(dir_ / "missing", 4), log), kIoError);
}

}  // namespace
