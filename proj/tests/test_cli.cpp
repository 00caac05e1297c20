#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
};

RunResult run_cli(const std::string& args, const std::string& dir) {
    fs::create_directories(dir);
    std::string cmd = std::string(YAMABE_CLI_PATH) + " " + args + " > " + dir +
                      "/stdout.txt 2> " + dir + "/stderr.txt";
    int status = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WEXITSTATUS(status);
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kTmp = "cli_test_artifacts";

}  // namespace

TEST(Cli, SolveProducesDeterministicArtifacts) {
    const std::string dir = kTmp + "/solve1";
    auto res = run_cli("--out " + dir +
                           " solve --family power:2 --f power:1,5 --sign minus --a 1 "
                           "--rmax 10 --svg",
                       dir);
    ASSERT_EQ(res.exit_code, 0) << slurp(dir + "/stderr.txt");
    ASSERT_TRUE(fs::exists(dir + "/trajectory.csv"));
    ASSERT_TRUE(fs::exists(dir + "/report.json"));
    ASSERT_TRUE(fs::exists(dir + "/solution.svg"));

    const std::string csv = slurp(dir + "/trajectory.csv");
    EXPECT_EQ(csv.substr(0, 12), "r,w,wprime\n0");

    auto j = nlohmann::json::parse(slurp(dir + "/report.json"));
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["sigma_calibration"], 1);
    EXPECT_EQ(j["termination"]["kind"], "ReachedEnd");
    EXPECT_EQ(j["config"]["family"], "power:2");
    EXPECT_EQ(j["classification"]["observed"],
              "positive_monotone_decreasing_stable");
    EXPECT_LE(j["energy"]["drift_per_unit_r"].get<double>(), 1e-9);
    EXPECT_LE(j["pohozaev_residual"].get<double>(), 1e-6);

    // identical config => byte-identical outputs
    const std::string dir2 = kTmp + "/solve2";
    auto res2 = run_cli("--out " + dir2 +
                            " solve --family power:2 --f power:1,5 --sign minus --a 1 "
                            "--rmax 10 --svg",
                        dir2);
    ASSERT_EQ(res2.exit_code, 0);
    EXPECT_EQ(slurp(dir + "/trajectory.csv"), slurp(dir2 + "/trajectory.csv"));
    std::string r1 = slurp(dir + "/report.json"), r2 = slurp(dir2 + "/report.json");
    // the only allowed difference is the configured output directory itself
    size_t p;
    while ((p = r1.find(dir)) != std::string::npos) r1.replace(p, dir.size(), "OUT");
    while ((p = r2.find(dir2)) != std::string::npos) r2.replace(p, dir2.size(), "OUT");
    EXPECT_EQ(r1, r2);
    EXPECT_EQ(slurp(dir + "/solution.svg"), slurp(dir2 + "/solution.svg"));
}

TEST(Cli, NegativeLambdaRunReportsBlowUp) {
    const std::string dir = kTmp + "/blowup";
    auto res = run_cli(
        "--out " + dir + " solve --family power:1 --f power:-1,3 --sign minus --a 0.5",
        dir);
    ASSERT_EQ(res.exit_code, 0) << slurp(dir + "/stderr.txt");
    auto j = nlohmann::json::parse(slurp(dir + "/report.json"));
    EXPECT_EQ(j["termination"]["kind"], "BlowUp");
    EXPECT_TRUE(j["termination"].contains("R_est"));
}

TEST(Cli, MissingRequiredFlagIsUsageError) {
    const std::string dir = kTmp + "/usage";
    auto res = run_cli("--out " + dir + " solve --family power:2 --f power:1,5", dir);
    EXPECT_EQ(res.exit_code, 2);
    auto err = nlohmann::json::parse(slurp(dir + "/stderr.txt"));
    EXPECT_TRUE(err.contains("error"));
}

TEST(Cli, UnknownSuiteIsUsageError) {
    const std::string dir = kTmp + "/badsuite";
    auto res = run_cli("--out " + dir + " verify nonsense", dir);
    EXPECT_EQ(res.exit_code, 2);
}

TEST(Cli, InvalidFamilyParameterIsUsageError) {
    const std::string dir = kTmp + "/badfam";
    auto res = run_cli(
        "--out " + dir + " solve --family sinh:1,2,plus --f power:1,3 --a 1", dir);
    EXPECT_EQ(res.exit_code, 2);  // alpha - beta < 0 rejected
}

TEST(Cli, VerifyTablesSuitePasses) {
    const std::string dir = kTmp + "/tables";
    auto res = run_cli("--out " + dir + " verify tables", dir);
    EXPECT_EQ(res.exit_code, 0) << slurp(dir + "/stdout.txt");
    auto j = nlohmann::json::parse(slurp(dir + "/verify_tables.json"));
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_GE(j["assertions"].size(), 40u);
}

TEST(Cli, ConfigFileRoundTrip) {
    const std::string dir = kTmp + "/config";
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir + "/run.ini");
        cfg << "out = " << dir << "\n";
        cfg << "[solve]\n";
        cfg << "family = power:2\n";
        cfg << "f = \"power:1,5\"\n";  // quoted: the value itself contains a comma
        cfg << "a = 1\n";
        cfg << "rmax = 5\n";
    }
    auto res = run_cli("--config " + dir + "/run.ini solve", dir);
    ASSERT_EQ(res.exit_code, 0) << slurp(dir + "/stderr.txt");
    auto j = nlohmann::json::parse(slurp(dir + "/report.json"));
    EXPECT_EQ(j["config"]["rmax"], 5.0);
}
