// Copyright 2026 The smmoney Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("smmoney_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    /// Runs the CLI with stdout captured to a file and returns the exit code.
    int run(const std::string& args) {
        const std::string cmd = std::string(SMMONEY_CLI_PATH) + " " + args + " > " + path("stdout.txt") + " 2> " +
                                path("stderr.txt");
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    std::string stdout_text() const { return slurp(path("stdout.txt")); }

    fs::path dir_;
};

constexpr const char* kSmall = "--n 4 --q 40 --l-size 10 --t-max 20 --epsilon 0.2 --delta 0.2";

TEST_F(Cli, PrepareIsDeterministicPerSeed) {
    ASSERT_EQ(run(std::string("prepare ") + kSmall + " --seed 5 --out " + path("a")), 0);
    ASSERT_EQ(run(std::string("prepare ") + kSmall + " --seed 5 --out " + path("b")), 0);
    ASSERT_EQ(run(std::string("prepare ") + kSmall + " --seed 6 --out " + path("c")), 0);
    EXPECT_EQ(slurp(path("a.note.json")), slurp(path("b.note.json")));
    EXPECT_EQ(slurp(path("a.secret.json")), slurp(path("b.secret.json")));
    EXPECT_NE(slurp(path("a.note.json")), slurp(path("c.note.json")));
    const auto secret = nlohmann::json::parse(slurp(path("a.secret.json")));
    EXPECT_EQ(secret["sensitive"], true);
}

TEST_F(Cli, VerifyAcceptsUntilContactsRunOut) {
    ASSERT_EQ(run(std::string("prepare ") + kSmall + " --seed 1 --out " + path("n")), 0);
    const std::string verify =
        "verify --note " + path("n.note.json") + " --secret " + path("n.secret.json") + " --out " + path("rep.jsonl");
    EXPECT_EQ(run(verify), 0) << stdout_text();
    EXPECT_NE(stdout_text().find("bit 1"), std::string::npos);
    EXPECT_EQ(run(verify), 0) << stdout_text();
    EXPECT_EQ(run(verify), 1);
    EXPECT_NE(stdout_text().find("count"), std::string::npos) << stdout_text();
    const std::string reports = slurp(path("rep.jsonl"));
    EXPECT_EQ(std::count(reports.begin(), reports.end(), '\n'), 3);
}

TEST_F(Cli, TamperedReportIsRejected) {
    ASSERT_EQ(run(std::string("prepare ") + kSmall + " --seed 2 --out " + path("n")), 0);
    std::ofstream(path("bad.json")) << R"({"session_id":0,"l_succ":1,"records":[{"j":9999,"k":1,"l":2,"d":0}]})"
                                    << "\n";
    EXPECT_EQ(run("verify --note " + path("n.note.json") + " --secret " + path("n.secret.json") + " --report-in " +
                  path("bad.json")),
              1);
    std::ofstream(path("lie.json")) << R"({"session_id":0,"l_succ":5,"records":[]})" << "\n";
    EXPECT_EQ(run("verify --note " + path("n.note.json") + " --secret " + path("n.secret.json") + " --report-in " +
                  path("lie.json")),
              1);
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("launder"), 2);
    EXPECT_EQ(run("attack --q 0"), 2);
    EXPECT_EQ(run("attack --n 1"), 2);
    EXPECT_EQ(run("attack --strategy teleport"), 2);
    EXPECT_EQ(run("attack --format xml"), 2);
    EXPECT_EQ(run("attack --trials banana"), 2);
    EXPECT_EQ(run(std::string("prepare ") + kSmall), 2);
    EXPECT_EQ(run("fidelity --n 30"), 2);
}

TEST_F(Cli, MissingOrBrokenFilesExitWithThree) {
    EXPECT_EQ(run("verify --note " + path("none.json") + " --secret " + path("none.json")), 3);
    std::ofstream(path("junk.json")) << "{ not json";
    EXPECT_EQ(run("verify --note " + path("junk.json") + " --secret " + path("junk.json")), 3);
    EXPECT_EQ(run("attack --config " + path("none.json")), 3);
    EXPECT_EQ(run(std::string("prepare ") + kSmall + " --out /nonexistent/dir/x"), 3);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
    std::ofstream(path("cfg.json")) << R"({"n": 4, "q": 200, "l_size": 50, "t_max": 100, "trials": 3,
                                          "strategy": "measure_resend", "format": "csv"})";
    ASSERT_EQ(run("attack --config " + path("cfg.json") + " --trials 5"), 0) << slurp(path("stderr.txt"));
    const std::string csv = stdout_text();
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST_F(Cli, AttackJsonSummary) {
    ASSERT_EQ(run("attack --n 4 --q 200 --l-size 50 --t-max 100 --trials 4 --strategy cloner_identity --out " +
                  path("a.json")),
              0);
    const auto j = nlohmann::json::parse(slurp(path("a.json")));
    EXPECT_TRUE(j.contains("analytic_bounds"));
}

TEST_F(Cli, FidelityAndSweep) {
    ASSERT_EQ(run("fidelity --n 3 --n-max 4 --format csv"), 0);
    const std::string csv = stdout_text();
    EXPECT_NE(csv.find("\n3,"), std::string::npos);
    EXPECT_NE(csv.find("\n4,"), std::string::npos);
    ASSERT_EQ(run("sweep --n 4 --trials 500"), 0);
    EXPECT_EQ(nlohmann::json::parse(stdout_text()).size(), 2U);
}

TEST_F(Cli, TableRuns) {
    ASSERT_EQ(run("table --trials 20000 --attack-trials 5 --format csv --out " + path("t.csv")), 0)
        << slurp(path("t.csv"));
    const std::string csv = slurp(path("t.csv"));
    EXPECT_EQ(csv.rfind("quantity,n,analytic,empirical,stderr,bound,pass", 0), 0U);
    EXPECT_EQ(csv.find(",false"), std::string::npos);
}

}  // namespace
