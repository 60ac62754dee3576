#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("mfs_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Result run(const std::string& args, const std::string& env = "") {
    const auto dir = fs::temp_directory_path();
    const auto o = dir / "mfs_cli_stdout.txt", e = dir / "mfs_cli_stderr.txt";
    const std::string cmd = env + " \"" MFS_CLI_PATH "\" " + args + " >\"" + o.string() + "\" 2>\"" + e.string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const auto p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

std::string example(const std::string& name) { return std::string(MFS_EXAMPLES_DIR) + "/" + name; }

int csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    int n = -1;  // header
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

}  // namespace

TEST(Cli, SpectrumUniformThree) {
    const auto out = scratch("spectrum");
    auto r = run("--config \"" + example("uniform3.json") + "\" --out \"" + out.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("unit-interval case: a"), std::string::npos);
    for (const char* f : {"spectrum.csv", "legendre.csv", "summary.txt", "resolved_config.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    // tau(q) = q - 1 in every row.
    std::ifstream in(out / "spectrum.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "q,T,T_prime,tau,branch,validity");
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string q, T, Tp, tau;
        std::getline(ss, q, ',');
        std::getline(ss, T, ',');
        std::getline(ss, Tp, ',');
        std::getline(ss, tau, ',');
        EXPECT_NEAR(std::stod(tau), std::stod(q) - 1, 1e-12) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 516);
}

TEST(Cli, GoldenCensus) {
    const auto out = scratch("census");
    auto r = run("--config \"" + example("golden.json") + "\" --task census --nmax 10 --out \"" + out.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(out / "census.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("n,N_n,", 0), 0u);
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(rows[2].rfind("3,7,", 0), 0u);
    EXPECT_NE(r.out.find("first exact overlap: depth 3"), std::string::npos);
}

TEST(Cli, MalformedConfigReportsLocation) {
    const auto dir = scratch("malformed");
    auto p = write_config(dir, "{\n  \"task\": \"spectrum\",\n  \"ifs\": {\"maps\": [ ]\n");
    auto r = run("--config \"" + p.string() + "\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;

    p = write_config(dir, R"({"task": "spectrum", "ifs": {"maps": [{"ratio": "1/2", "translation": 0, "rotation": 1}]}})");
    r = run("--config \"" + p.string() + "\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/ifs/maps/0/rotation"), std::string::npos) << r.err;

    p = write_config(dir, R"({"task": "spectrum", "colour": 1, "ifs": {"maps": [{"ratio": "1/2", "translation": 0}]}})");
    r = run("--config \"" + p.string() + "\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/colour"), std::string::npos) << r.err;

    p = write_config(dir, R"({"task": "spectrum", "n_max": "3", "ifs": {"maps": [{"ratio": "1/2", "translation": 0}]}})");
    r = run("--config \"" + p.string() + "\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/n_max"), std::string::npos) << r.err;

    p = write_config(dir, R"({"task": "spectrum", "ifs": {"maps": [{"ratio": "6/5", "translation": 0}]}})");
    r = run("--config \"" + p.string() + "\"");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("non-contracting"), std::string::npos) << r.err;

    r = run("--config \"" + (dir / "missing.json").string() + "\"");
    EXPECT_EQ(r.code, 2);
    r = run("--task spectrum");
    EXPECT_EQ(r.code, 2);
}

TEST(Cli, ContradictoryAssertions) {
    const auto dir = scratch("contradiction");
    auto p = write_config(dir, R"({"task": "spectrum", "output": {"dir": ")" + (dir / "out").string() +
                                   R"("}, "ifs": {"maps": [{"ratio": "1/2", "translation": 0}, {"ratio": "1/2", "translation": "1/2"}],
                                   "assertions": {"osc": true, "esc": false}}})");
    auto r = run("--config \"" + p.string() + "\"");
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_NE(r.err.find("contradictory"), std::string::npos);
}

TEST(Cli, BudgetExitCode) {
    const auto out = scratch("budget");
    auto r = run("--config \"" + example("digit.json") + "\" --task empirical --budget 1000 --out \"" + out.string() + "\"");
    EXPECT_EQ(r.code, 4) << r.err;
    EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST(Cli, ReproducibleOutputs) {
    const auto a = scratch("repro_a"), b = scratch("repro_b");
    const std::string cfg = "--config \"" + example("salem.json") + "\" --nmax 9";
    auto ra = run(cfg + " --out \"" + a.string() + "\"");
    auto rb = run(cfg + " --out \"" + b.string() + "\"");
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(rb.code, 0) << rb.err;
    int csvs = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        ++csvs;
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
    }
    EXPECT_GE(csvs, 3);
}

TEST(Cli, ResolvedConfigReproducesRun) {
    const auto a = scratch("resolved_a"), b = scratch("resolved_b");
    auto ra = run("--config \"" + example("cantor.json") + "\" --out \"" + a.string() + "\"");
    ASSERT_EQ(ra.code, 0) << ra.err;
    auto resolved = nlohmann::json::parse(slurp(a / "resolved_config.json"));
    resolved["output"]["dir"] = b.string();
    const auto p = write_config(scratch("resolved_cfg"), resolved.dump(2));
    auto rb = run("--config \"" + p.string() + "\"");
    ASSERT_EQ(rb.code, 0) << rb.err;
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
    }
}

TEST(Cli, EnvironmentOverridesThenFlags) {
    const auto out = scratch("env");
    auto r = run("--config \"" + example("golden.json") + "\" --task census --out \"" + out.string() + "\"", "MFS_NMAX=5");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(csv_rows(out / "census.csv"), 5);
    r = run("--config \"" + example("golden.json") + "\" --task census --nmax 6 --out \"" + out.string() + "\"", "MFS_NMAX=5");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(csv_rows(out / "census.csv"), 6);
    const auto out2 = scratch("env_out");
    r = run("--config \"" + example("golden.json") + "\"", "MFS_TASK=census MFS_NMAX=4 MFS_OUT=\"" + out2.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(csv_rows(out2 / "census.csv"), 4);
    r = run("--config \"" + example("golden.json") + "\"", "MFS_NMAX=abc");
    EXPECT_EQ(r.code, 2);
}

TEST(Cli, RationalBoundReport) {
    const auto out = scratch("rational");
    auto r = run("--config \"" + example("rational_bound.json") + "\" --out \"" + out.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("rational bound: pass"), std::string::npos);
    EXPECT_NE(r.out.find("AWSC: true"), std::string::npos);
}
