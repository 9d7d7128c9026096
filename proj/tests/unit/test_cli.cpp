#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "hyperid/bench.hpp"
#include "hyperid/io.hpp"

using namespace hyperid;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hyperid");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        ::unsetenv(cli::kOutputDirEnv);
        dir_ = fs::temp_directory_path() / ("hyperid_cli_" + std::to_string(::getpid())) /
               ::testing::UnitTest::GetInstance()->current_test_info()->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { ::unsetenv(cli::kOutputDirEnv); }

    std::string path(const std::string& leaf) const { return (dir_ / leaf).string(); }
    nlohmann::json read_json(const std::string& leaf) const {
        std::ifstream in(dir_ / leaf);
        return nlohmann::json::parse(in);
    }
    std::size_t count_lines(const std::string& leaf) const {
        std::ifstream in(dir_ / leaf);
        std::size_t k = 0;
        for (std::string line; std::getline(in, line);) ++k;
        return k;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateWritesTrajectory) {
    const auto r = run({"simulate", "--preset", "vdp", "--n", "10000", "--seed", "7", "-o", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_lines("trajectory.csv"), 10001u);
    const auto meta = read_json("trajectory.json");
    EXPECT_EQ(meta["config"]["seed"], 7u);
    EXPECT_EQ(meta["metadata"]["rng"], "splitmix64-counter/box-muller");
}

TEST_F(CliTest, NoiseFlagParses) {
    const auto r = run({"simulate", "--n", "100", "--noise", "sign_flip:0.5", "-o", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_json("trajectory.json")["config"]["noise"], "sign_flip:0.5");
    EXPECT_EQ(run({"simulate", "--noise", "sign_flip", "-o", dir_.string()}).code, 2);
}

TEST_F(CliTest, MissingConfigIsUsageError) {
    const auto missing = path("absent.json");
    const auto r = run({"simulate", "--config", missing});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
    EXPECT_EQ(run({"simulate", "--frobnicate"}).code, 2);
    EXPECT_EQ(run({"launch"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, HelpListsFlags) {
    const auto r = run({"benchmark", "--help"});
    EXPECT_EQ(r.code, 0);
    for (const char* flag : {"--config", "--preset", "--n", "--N", "--lambda", "--trials", "--seed",
                             "--noise", "--substeps", "--threads", "--output-dir", "--verbose"}) {
        EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
    }
}

TEST_F(CliTest, EstimateMatchesRunTrial) {
    ASSERT_EQ(run({"simulate", "--seed", "7", "-o", dir_.string()}).code, 0);
    const auto r = run({"estimate", "-d", path("trajectory.csv"), "-N", "200", "--lambda", "1",
                        "-o", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    ExperimentConfig c;
    c.seed = 7;
    const auto rec = run_trial(c, 200, 0);
    const auto j = read_json("estimate.json");
    ASSERT_EQ(j["theta_hat"].size(), 2u);
    EXPECT_EQ(j["theta_hat"][0].get<double>(), rec.theta_hat(0));
    EXPECT_EQ(j["theta_hat"][1].get<double>(), rec.theta_hat(1));
    EXPECT_NE(r.out.find("theta_hat_1 = " + format_double(rec.theta_hat(0))), std::string::npos);
}

TEST_F(CliTest, EstimateNoiselessPolynomial) {
    ASSERT_EQ(run({"simulate", "--preset", "const_accel", "--n", "1200", "--noise", "none", "-o",
                   dir_.string()})
                  .code,
              0);
    const auto r = run({"estimate", "--preset", "const_accel", "-d", path("trajectory.csv"), "-N", "60",
                        "--lambda", "1e-8", "-o", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(read_json("estimate.json")["theta_hat"][0].get<double>(), -9.81, 1e-6);
}

TEST_F(CliTest, EstimateWindowTooLarge) {
    ASSERT_EQ(run({"simulate", "--n", "300", "-o", dir_.string()}).code, 0);
    EXPECT_EQ(run({"estimate", "-d", path("trajectory.csv"), "-N", "301", "-o", dir_.string()}).code, 2);
    EXPECT_EQ(run({"estimate", "-d", path("nothing.csv"), "-o", dir_.string()}).code, 2);
}

TEST_F(CliTest, BenchmarkSmoke) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run({"benchmark", "--trials", "1", "-o", dir_.string()});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(secs, 10.0);
    const auto s = read_json("summary.json");
    ASSERT_EQ(s["per_N"].size(), 4u);
    EXPECT_EQ(s["per_N"][0]["N"], 50);
    EXPECT_EQ(s["per_N"][3]["N"], 400);
    EXPECT_EQ(count_lines("trials.csv"), 5u);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
    std::ofstream(path("cfg.json")) << R"({"windows": [100, 200], "trials": 2, "seed": 3})";
    const auto r = run({"benchmark", "--config", path("cfg.json"), "--seed", "9", "-o", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = read_json("summary.json");
    EXPECT_EQ(s["config"]["seed"], 9u);
    EXPECT_EQ(s["config"]["trials"], 2);
    EXPECT_EQ(s["per_N"].size(), 2u);
    std::ofstream(path("bad.json")) << R"({"bogus": 1})";
    EXPECT_EQ(run({"benchmark", "--config", path("bad.json")}).code, 2);
}

TEST_F(CliTest, OutputDirFromEnvironment) {
    const auto env_dir = dir_ / "from_env";
    ::setenv(cli::kOutputDirEnv, env_dir.c_str(), 1);
    ASSERT_EQ(run({"simulate", "--n", "50"}).code, 0);
    EXPECT_TRUE(fs::exists(env_dir / "trajectory.csv"));
    const auto flag_dir = dir_ / "from_flag";
    ASSERT_EQ(run({"simulate", "--n", "50", "-o", flag_dir.string()}).code, 0);
    EXPECT_TRUE(fs::exists(flag_dir / "trajectory.csv"));
}

TEST_F(CliTest, ScanWritesCurves) {
    const auto r = run({"scan", "--n", "1000", "--points", "11", "-o", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_lines("likelihood_theta1.csv"), 12u);
    EXPECT_EQ(count_lines("likelihood_theta2.csv"), 12u);
    EXPECT_EQ(run({"scan", "--axis", "3", "-o", dir_.string()}).code, 2);
}

TEST_F(CliTest, BoundsOnSineFixturePass) {
    const auto r = run({"bounds", "--trials", "500", "-o", dir_.string()});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_TRUE(read_json("bounds_sine.json")["all_pass"].get<bool>());
}

TEST_F(CliTest, RepeatedRunsAreIdentical) {
    ASSERT_EQ(run({"benchmark", "--trials", "3", "-N", "100", "-o", dir_.string()}).code, 0);
    std::ifstream a(dir_ / "trials.csv");
    const std::string first((std::istreambuf_iterator<char>(a)), {});
    ASSERT_EQ(run({"benchmark", "--trials", "3", "-N", "100", "-o", dir_.string()}).code, 0);
    std::ifstream b(dir_ / "trials.csv");
    const std::string second((std::istreambuf_iterator<char>(b)), {});
    EXPECT_EQ(first, second);
}
