#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(PSSFORGE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("pssforge-cli-" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").status == 0);
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("verify").status == 2);
  CHECK(run("verify --catalog sine-gordon --bogus").status == 2);
  CHECK(run("verify --catalog no-such-entry").status == 2);
  CHECK(run("verify --branch T33 --delta 3").status == 2);
  CHECK(run("--format yaml verify --catalog kdv").status == 2);
}

TEST_CASE("verify") {
  CHECK(run("verify --catalog sine-gordon --lemma").status == 2);
  Run sg = run("verify --catalog sine-gordon --zcr");
  CHECK(sg.status == 0);
  auto j = nlohmann::json::parse(sg.out);
  CHECK(j.at("pass") == true);
  CHECK(run("verify --branch T33 --delta -1 --sign -").status == 0);
  CHECK(run("verify --branch T35-II --delta -1 --param eta=1 --param gamma=1 --param sigma=0 --param r=1").status == 0);
  CHECK(run("verify --branch T33 --param r=0").status == 2);

  std::string broken = temp_file("broken.json", R"J({"coframe": {"delta": 1,
    "f": [["0", "0"], ["eta", "cos(z)/eta"], ["z1", "0"]]},
    "equation": {"class": "generic", "rules": [{"var": "z1t", "rhs": "sin(z)"}]}})J");
  Run bad = run("verify --coframe " + broken + " --equation " + broken);
  CHECK(bad.status == 1);
  CHECK(nlohmann::json::parse(bad.out).at("pass") == false);

  std::string truncated = temp_file("truncated.json", R"J({"coframe": {"delta": 1, "f": [)J");
  CHECK(run("verify --coframe " + truncated + " --equation " + truncated).status == 2);
}

TEST_CASE("export round trip") {
  std::string path = (std::filesystem::temp_directory_path() / "pssforge-cli-sg.json").string();
  CHECK(run("export --catalog sine-gordon -o " + path).status == 0);
  CHECK(run("verify --coframe " + path + " --equation " + path).status == 0);
  Run latex = run("--format latex export --branch T32-II");
  CHECK(latex.status == 0);
  CHECK(latex.out.find("\\documentclass") != std::string::npos);
  CHECK(latex.out.find("\\end{document}") != std::string::npos);
}

TEST_CASE("catalog") {
  Run list = run("catalog list");
  CHECK(list.status == 0);
  CHECK(nlohmann::json::parse(list.out).size() == 15);
  CHECK(run("catalog show kdv").status == 0);
  CHECK(run("catalog show nls").status == 2);
}

TEST_CASE("conservation") {
  Run sg = run("conservation --catalog sine-gordon --order 2");
  CHECK(sg.status == 0);
  CHECK(nlohmann::json::parse(sg.out).at("pairs").size() == 2);
  CHECK(run("conservation --catalog kdv").status == 1);
  CHECK(run("conservation --catalog kdv --shift eta^2/2 --speed -3*eta^2/2").status == 0);
  CHECK(run("conservation --catalog kdv --shift 1 --speed 0").status != 0);
}

TEST_CASE("curvature") {
  CHECK(run("curvature --fixture sphere").status == 0);
  CHECK(run("curvature --fixture hyperbolic").status == 0);
  CHECK(run("curvature --catalog sine-gordon --solution kink --nx 301 --nt 301").status == 0);
  CHECK(run("curvature --catalog kdv --solution zero --nx 40 --nt 40").status == 1);
  CHECK(run("curvature --catalog kdv --solution breather").status == 2);
}

TEST_CASE("output is deterministic") {
  for (const char* args : {"verify --catalog hunter-saxton --zcr --lemma", "catalog show camassa-holm",
                           "conservation --catalog sine-gordon --order 3", "selftest --cases 20 --seed 5"}) {
    CAPTURE(args);
    Run a = run(args), b = run(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
  }
}
