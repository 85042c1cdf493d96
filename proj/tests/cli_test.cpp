#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "desgraph_cli_test";

int run(const std::string& args, const std::string& out = "/dev/null") {
  const std::string cmd = std::string(DESGRAPH_CLI) + " " + args + " > " + out + " 2> " + (kWork / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string stderr_text() { return support::slurp((kWork / "stderr").string()); }

std::string data(const std::string& name) { return support::data_path(name); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  void TearDown() override { fs::remove_all(kWork); }
};

}  // namespace

TEST_F(Cli, BuildWritesCsv) {
  const auto csv = (kWork / "calf.csv").string();
  ASSERT_EQ(run("build " + data("calf.des") + " --out " + csv), 0);
  const auto t = desgraph::read_csv_file(csv);
  EXPECT_EQ(t.rows.size(), 80u);
  EXPECT_EQ(t.header, (std::vector<std::string>{"pen", "calf", "weight", "hay", "antiscour"}));
}

TEST_F(Cli, PrintsTable) {
  const auto out = (kWork / "table.txt").string();
  ASSERT_EQ(run("build " + data("calf.des"), out), 0);
  const auto text = support::slurp(out);
  EXPECT_EQ(text.rfind("# Calf feeding\n# An edibble: 80 x 5\n", 0), 0u);
}

TEST_F(Cli, SeedFlagIsDeterministic) {
  const auto a = (kWork / "a.csv").string(), b = (kWork / "b.csv").string(), c = (kWork / "c.csv").string();
  ASSERT_EQ(run("build " + data("garden.des") + " --seed 5 --out " + a), 0);
  ASSERT_EQ(run("build " + data("garden.des") + " --seed 5 --out " + b), 0);
  ASSERT_EQ(run("build " + data("garden.des") + " --seed 6 --out " + c), 0);
  EXPECT_EQ(support::slurp(a), support::slurp(b));
  EXPECT_NE(support::slurp(a), support::slurp(c));
}

TEST_F(Cli, ExitCodes) {
  const auto spec = (kWork / "missing.des").string();
  std::ofstream(spec) << "design\nunits:\n  u = 2\ntrts:\n  t = 2\nallot:\n  t ~ u\n";
  EXPECT_EQ(run("build " + spec), 1);
  EXPECT_NE(stderr_text().find("error[UnassignedTreatments]"), std::string::npos);

  const auto bad = (kWork / "bad.des").string();
  std::ofstream(bad) << "design\nunits:\n  u = = 2\n";
  EXPECT_EQ(run("build " + bad), 2);
  EXPECT_NE(stderr_text().find("syntax error: line 3, column 7"), std::string::npos);

  EXPECT_EQ(run("build " + (kWork / "absent.des").string()), 1);
  EXPECT_EQ(run("build"), 2);
  EXPECT_EQ(run("ingest " + data("wheat.csv") + " --units nope"), 1);
  EXPECT_NE(stderr_text().find("error[UnknownColumn]"), std::string::npos);
  EXPECT_EQ(run("menu nope"), 1);
}

TEST_F(Cli, TreeAndGraph) {
  const auto tree = (kWork / "tree.txt").string();
  ASSERT_EQ(run("build " + data("calf.des") + " --tree", tree), 0);
  EXPECT_EQ(support::slurp(tree).rfind("Calf feeding\n", 0), 0u);
  const auto dot = (kWork / "g.dot").string();
  ASSERT_EQ(run("build " + data("calf.des") + " --graph factors " + dot), 0);
  EXPECT_EQ(support::slurp(dot).rfind("digraph", 0), 0u);
}

TEST_F(Cli, ExportAndOverwrite) {
  const auto dir = (kWork / "export").string();
  ASSERT_EQ(run("build " + data("field.des") + " --export " + dir), 0);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "manifest.json"));
  EXPECT_EQ(run("build " + data("field.des") + " --export " + dir), 1);
  EXPECT_NE(stderr_text().find("error[TargetExists]"), std::string::npos);
  EXPECT_EQ(run("build " + data("field.des") + " --export " + dir + " --overwrite"), 0);
}

TEST_F(Cli, MenuTakeoutAndScan) {
  const auto src = (kWork / "menu.des").string();
  ASSERT_EQ(run("menu rcbd --t 3 --r 2 seed=4", src), 0);
  const auto csv = (kWork / "rcbd.csv").string();
  ASSERT_EQ(run("build " + src + " --out " + csv), 0);
  EXPECT_EQ(desgraph::read_csv_file(csv).rows.size(), 6u);
  const auto scan = (kWork / "scan.txt").string();
  ASSERT_EQ(run("scan-menu", scan), 0);
  EXPECT_NE(support::slurp(scan).find("# A tibble: 10 x 4"), std::string::npos);
  EXPECT_EQ(run("takeout lsd"), 0);
}

TEST_F(Cli, Ingest) {
  const auto out = (kWork / "wheat.txt").string();
  ASSERT_EQ(run("ingest " + data("wheat.csv") + " --units col,row,rep --trts gen", out), 0);
  const auto text = support::slurp(out);
  EXPECT_NE(text.find("330 x 5"), std::string::npos);
  EXPECT_NE(text.find("<U(15)>"), std::string::npos);
  EXPECT_NE(text.find("<T(107)>"), std::string::npos);
}
