#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(ROBUSTPG_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("robustpg_cli_" + name);
}

}  // namespace

TEST(Cli, Classify) {
    EXPECT_EQ(run("classify --m1 0.5 --m2 0.5").out, "SYM_I\n");
    EXPECT_EQ(run("classify --m1 0.9 --m2 0.9").out, "SYM_II\n");
    EXPECT_EQ(run("classify --m1 0.6 --m2 0.55").out, "AREA_I\n");
    EXPECT_EQ(run("classify --m1 0.9 --m2 0.8").out, "AREA_II\n");
    EXPECT_EQ(run("classify --m1 0.8 --m2 0.55").out, "AREA_III\n");
    EXPECT_EQ(run("classify --m1 0.6 --m2 0.2").out, "AREA_IV\n");
    const auto j = nlohmann::json::parse(run("classify --m1 0.2 --m2 0.6 --json").out);
    EXPECT_EQ(j["case"], "AREA_IV");
    EXPECT_TRUE(j["reordered"].get<bool>());
}

TEST(Cli, SolveWritesParams) {
    const auto r = run("solve --m 0.84 --m 0.84");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["case"], "SYM_II");
    EXPECT_NEAR(j["constants"]["r2"].get<double>(), 0.2, 1e-15);
    EXPECT_NEAR(j["guarantee"].get<double>(), 0.72, 1e-14);
}

TEST(Cli, EvalAtTop) {
    const auto path = temp_file("symhigh.json");
    ASSERT_EQ(run("solve --m 0.84 --m 0.84 --out " + path.string()).code, 0);
    const auto r = run("eval --params " + path.string() + " --v 1 --v 1");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["q"].get<double>(), 1.0, 1e-15);
    EXPECT_NEAR(j["t"][0].get<double>(), 0.6, 1e-14);
    EXPECT_NEAR(j["t"][1].get<double>(), 0.6, 1e-14);
    std::filesystem::remove(path);
}

TEST(Cli, SampleIsReproducible) {
    const auto path = temp_file("area2.json");
    ASSERT_EQ(run("solve --m 0.9 --m 0.8 --out " + path.string()).code, 0);
    const auto a = run("sample --params " + path.string() + " --n 50 --seed 7");
    const auto b = run("sample --params " + path.string() + " --n 50 --seed 7");
    const auto c = run("sample --params " + path.string() + " --n 50 --seed 8");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(a.out.rfind("v1,v2\n", 0), 0u);
    std::istringstream lines(a.out);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) ++count;
    EXPECT_EQ(count, 51);
    std::filesystem::remove(path);
}

TEST(Cli, VerifyExitCodes) {
    const std::string fast = " --grid 51 --cert-grid 51 --audit-grid 21 --mc 20000";
    EXPECT_EQ(run("verify --m 0.84 --m 0.84" + fast).code, 0);

    const auto path = temp_file("tampered.json");
    ASSERT_EQ(run("solve --m 0.84 --m 0.84 --out " + path.string()).code, 0);
    auto j = nlohmann::json::parse(std::ifstream(path));
    j["constants"]["r2"] = j["constants"]["r2"].get<double>() + 1e-3;
    std::ofstream(path) << j.dump();
    const auto r = run("verify --params " + path.string() + fast);
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(nlohmann::json::parse(r.out)["all_pass"].get<bool>());
    std::filesystem::remove(path);
}

TEST(Cli, SweepDiagonal) {
    const auto r = run("sweep --diagonal 0.7:0.8:3");
    ASSERT_EQ(r.code, 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "m1,m2,case,guarantee");
    std::getline(lines, line);
    EXPECT_EQ(line.rfind("0.69999999999999996,0.69999999999999996,SYM_I,", 0), 0u);
    std::getline(lines, line);
    EXPECT_EQ(line.rfind("0.75,0.75,SYM_II,", 0), 0u);
    std::getline(lines, line);
    EXPECT_NE(line.find("SYM_II"), std::string::npos);
}

TEST(Cli, ErrorExitCodes) {
    EXPECT_EQ(run("classify --m1 1.5 --m2 0.5").code, 2);
    EXPECT_EQ(run("solve --m 0.5 --mode nagent --n 3").code, 2);
    EXPECT_EQ(run("eval --params /nonexistent/p.json --v 1 --v 1").code, 4);
    EXPECT_EQ(run("sweep --diagonal nonsense").code, 2);
}
