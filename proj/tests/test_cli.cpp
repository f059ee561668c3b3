// Drives the anomq binary end to end and checks exit codes and outputs.
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "json.hpp"

#include "doctest.h"
#include "support.hpp"

#ifndef ANOMQ_CLI_PATH
#error "ANOMQ_CLI_PATH must name the CLI binary"
#endif

using anomq::testing::TempDir;
using anomq::testing::read_text;
using anomq::testing::write_text;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + ANOMQ_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("cli simulate then query") {
  TempDir dir;
  REQUIRE(run("simulate --n 200 --shape '{\"shape\":\"line\",\"k\":4}' --seed 3 --out-dir " +
              q(dir.path())) == 0);
  CHECK(std::filesystem::exists(dir / "graph.tsv"));
  CHECK(std::filesystem::exists(dir / "pvalues.csv"));
  CHECK(std::filesystem::exists(dir / "truth.json"));

  CHECK(run("query --graph " + q(dir / "graph.tsv") + " --pvalues " + q(dir / "pvalues.csv") +
            " --query '{\"shape\":\"line\",\"k\":4}' --out " + q(dir / "r.json")) == 0);
  auto r = nlohmann::json::parse(read_text(dir / "r.json"));
  CHECK(r["schema"] == "anomq/v1");
  CHECK(r["feasible"] == true);
  CHECK(r["ged"] == 0);
  auto truth = nlohmann::json::parse(read_text(dir / "truth.json"));
  auto found = r["vertices"].get<std::vector<unsigned>>();
  auto planted = truth["vertices"].get<std::vector<unsigned>>();
  std::sort(planted.begin(), planted.end());
  CHECK(found == planted);
}

TEST_CASE("cli query from attributes") {
  TempDir dir;
  write_text(dir / "g.tsv", "0\t1\n1\t2\n0\t2\n2\t3\n3\t4\n");
  // vertices 0..2 spike in the last column
  std::string csv = "vertex,t_0,t_1,t_2,t_3,t_4,t_5,t_6,t_7,t_8,t_9\n";
  for (int v = 0; v < 5; ++v) {
    csv += std::to_string(v);
    for (int t = 0; t < 9; ++t) csv += "," + std::to_string(1 + (t * 7 + v) % 5);
    csv += v < 3 ? ",50\n" : ",0\n";
  }
  write_text(dir / "a.csv", csv);
  for (const char* stat : {"bj", "hc", "ebp", "kull"}) {
    CHECK(run("query --graph " + q(dir / "g.tsv") + " --attrs " + q(dir / "a.csv") +
              " --query '{\"shape\":\"ring\",\"k\":3}' --stat " + stat + " --export-pvalues " +
              q(dir / "p.csv") + " --out " + q(dir / "r.json")) == 0);
    auto r = nlohmann::json::parse(read_text(dir / "r.json"));
    CHECK(r["vertices"] == nlohmann::json::array({0, 1, 2}));
  }
  CHECK(read_text(dir / "p.csv").rfind("vertex,pvalue", 0) == 0);
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  write_text(dir / "path.tsv", "0\t1\n1\t2\n2\t3\n");
  write_text(dir / "p.csv", "vertex,pvalue\n0,0.01\n1,0.01\n2,0.01\n3,0.5\n");
  const std::string base = "query --graph " + q(dir / "path.tsv") + " --pvalues " + q(dir / "p.csv");

  SUBCASE("infeasible query") {
    // the only roots examined are isolated
    write_text(dir / "iso.tsv", "0\t1\n5\t6\n");
    write_text(dir / "iso.csv", "vertex,pvalue\n2,0.01\n3,0.01\n4,0.01\n");
    CHECK(run("query --graph " + q(dir / "iso.tsv") + " --pvalues " + q(dir / "iso.csv") +
              " --query '{\"shape\":\"ring\",\"k\":3}' --max-iters 1") == 1);
    CHECK(run("oracle --graph " + q(dir / "path.tsv") + " --pvalues " + q(dir / "p.csv") +
              " --query '{\"shape\":\"ring\",\"k\":3}'") == 1);
  }
  SUBCASE("input errors") {
    CHECK(run(base + " --query '{\"shape\":\"blob\"}'") == 2);
    CHECK(run(base + " --query '{\"shape\":\"ring\",\"k\":3}' --stat nope") == 2);
    CHECK(run(base + " --query '{\"shape\":\"ring\",\"k\":9}'") == 2);
    CHECK(run("query --graph " + q(dir / "missing.tsv") + " --pvalues " + q(dir / "p.csv") +
              " --query '{\"shape\":\"ring\",\"k\":3}'") == 2);
    CHECK(run("query --pvalues " + q(dir / "p.csv")) == 2);
    CHECK(run("no-such-verb") == 2);
    write_text(dir / "bad.csv", "vertex,pvalue\n0,abc\n");
    CHECK(run("query --graph " + q(dir / "path.tsv") + " --pvalues " + q(dir / "bad.csv") +
              " --query '{\"shape\":\"line\",\"k\":3}'") == 2);
  }
  SUBCASE("resource limit") {
    std::string big;
    for (int v = 0; v + 1 < 20; ++v) big += std::to_string(v) + "\t" + std::to_string(v + 1) + "\n";
    write_text(dir / "big.tsv", big);
    CHECK(run("oracle --graph " + q(dir / "big.tsv") + " --pvalues " + q(dir / "p.csv") + " --query '{\"shape\":\"line\",\"k\":3}'") == 3);
  }
  SUBCASE("success") {
    CHECK(run(base + " --query '{\"shape\":\"line\",\"k\":3}'") == 0);
    CHECK(run("--help") == 0);
  }
}

TEST_CASE("cli eval writes csv and json") {
  TempDir dir;
  write_text(dir / "spec.json",
             R"({"simulation":{"n":100},"queries":[{"shape":"ring","k":3}],"noise":[5,20],"trials":2,"timing":false})");
  REQUIRE(run("eval --spec " + q(dir / "spec.json") + " --out " + q(dir / "res")) == 0);
  const auto first = read_text(dir / "res.csv");
  auto j = nlohmann::json::parse(read_text(dir / "res.json"));
  CHECK(j["schema"] == "anomq/v1");
  CHECK(j["rows"].size() == 4);
  REQUIRE(run("eval --spec " + q(dir / "spec.json") + " --out " + q(dir / "res")) == 0);
  CHECK(read_text(dir / "res.csv") == first);
}

TEST_CASE("cli bench") {
  TempDir dir;
  REQUIRE(run("bench --sizes 100,400 --repeats 1 --out " + q(dir / "b.json")) == 0);
  auto j = nlohmann::json::parse(read_text(dir / "b.json"));
  CHECK(j["rows"].size() == 2);
  CHECK(j.contains("slope"));
}
