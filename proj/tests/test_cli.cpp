#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pantswork/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = pw::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / "pantswork-cli-test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("rank") {
  auto five = run({"rank", scratch("five.txt", "node a\nnode b\nnode c\nnode d\nnode e\n")});
  CHECK(five.code == 0);
  CHECK(five.out == "(0, 5)\n");
  auto one = run({"rank", scratch("one.txt", "node a\n")});
  CHECK(one.out == "(0, 1)\n");
  auto omega = run({"rank", scratch("omega.txt", "node x children=gen:rank(1)\n")});
  CHECK(omega.code == 0);
  CHECK(omega.out == "(1, 1)\n");
  CHECK(run({"rank", scratch("cantor.txt", "node c children=gen:cantor\n")}).code == 3);
  CHECK(run({"rank", scratch("junk.txt", "nod a\n")}).code == 2);
  CHECK(run({"rank", "/nonexistent/spec"}).code == 2);
}

TEST_CASE("build exit codes") {
  CHECK(run({"build", "--algo", "re", scratch("empty.txt", "")}).code == 2);
  CHECK(run({"build", "--algo", "eta-sphere", "--eta", "w^9"}).code == 3);
  CHECK(run({"build", "--algo", "eta-sphere", "--eta", "w^3", "--rank-bound", "2"}).code == 3);
  CHECK(run({"build", "--algo", "re", scratch("cantor.txt", "node c children=gen:cantor\n")}).code == 3);
  CHECK(run({"build", "--algo", "pure", scratch("two.txt", "node a\nnode b\n")}).code == 4);
  CHECK(run({"build", "--algo", "nonsense"}).code == 2);
  CHECK(run({"build", "--algo", "biflute", "--params", "0,1"}).code == 2);
}

TEST_CASE("build outputs") {
  auto re = run({"--depth", "4", "build", "--algo", "re", scratch("genus2.txt", "node a genus\nnode b genus\n")});
  CHECK(re.code == 0);
  CHECK(re.out.rfind("pantsgraph v1\n", 0) == 0);
  CHECK(re.out.find("\nwitness v1\nswap ") != std::string::npos);

  auto pure = run({"build", "--algo", "pure", scratch("cantor2.txt", "cantor genus=(L),(RL)\n")});
  CHECK(pure.code == 0);
  CHECK(pure.out.find("witness v1") == std::string::npos);

  auto eta = run({"build", "--algo", "eta-sphere", "--eta", "2", "--depth", "3"});
  CHECK(eta.code == 0);
  auto tree = run({"build", "--algo", "tree", "--eta", "0", "--genus", "--depth", "3"});
  CHECK(tree.code == 0);
  CHECK(tree.out.find("vertex t") != std::string::npos);

  // deterministic, and --out writes the same bytes
  auto a = run({"build", "--algo", "biflute", "--params", "0,1,2", "--depth", "5"});
  auto b = run({"build", "--algo", "biflute", "--params", "0,1,2", "--depth", "5"});
  CHECK(a.out == b.out);
  const std::string path = scratch("biflute.pg", "");
  CHECK(run({"build", "--algo", "biflute", "--params", "0,1,2", "--depth", "5", "--out", path}).code == 0);
  CHECK(read(path) == a.out);
}

TEST_CASE("certify exit codes") {
  auto unit = run({"certify", "builtin:ladder", "--map", "shift:z:1", "--along", "0,1,1"});
  CHECK(unit.code == 0);
  CHECK(unit.out.find("verdict=MODULAR") != std::string::npos);

  auto x2 = run({"certify", "builtin:ladder", "--map", "shift:z:1", "--length", "spine:z=exp(i)@odd"});
  CHECK(x2.code == 10);
  CHECK(x2.out.find("growth=exp") != std::string::npos);

  auto mt = run({"certify", "builtin:ladder", "--map", "multitwist:spine:z=1"});
  CHECK(mt.code == 0);
  CHECK(mt.out.find("interval=[1.56418958354776,1.57556803898315]") != std::string::npos);

  // a threshold the sweep cannot reach stays open
  auto open = run({"--depth", "2", "certify", "builtin:ladder", "--map", "shift:z:1", "--length",
                   "spine:z=exp(i)@odd", "--threshold", "1e300"});
  CHECK(open.code == 11);
  CHECK(open.out.find("verdict=INCONCLUSIVE") != std::string::npos);

  CHECK(run({"certify", "builtin:ladder", "--map", "bogus"}).code == 2);
  CHECK(run({"certify", "builtin:nowhere"}).code == 2);
  CHECK(run({"certify", scratch("bad.pg", "pantsgraph v2\n")}).code == 2);
  CHECK(run({"certify", "--fixture", "missing"}).code == 2);
}

TEST_CASE("certify reads built graphs like the in-memory scheme") {
  const std::string path = scratch("ladder.pg", "");
  REQUIRE(run({"build", "--algo", "biflute", "--params", "0,1,1", "--depth", "18", "--out", path}).code == 0);
  auto file = run({"--depth", "8", "certify", path, "--map", "shift:z:1", "--along", "0,1,1"});
  auto mem = run({"--depth", "8", "certify", "builtin:ladder", "--map", "shift:z:1", "--along", "0,1,1"});
  CHECK(file.code == 0);
  CHECK(file.out == mem.out);

  auto x2 = run({"--depth", "16", "certify", path, "--map", "shift:z:1", "--length", "spine:z=exp(i)@odd"});
  CHECK(x2.code == 10);
  // at the file's own depth the shifted curves leave the graph
  auto edge = run({"--depth", "18", "certify", path, "--map", "shift:z:1", "--length", "spine:z=exp(i)@odd"});
  CHECK(edge.code == 5);
}

TEST_CASE("corpus") {
  auto all = run({"corpus"});
  CHECK(all.code == 0);
  CHECK(all.out.find("15 fixtures, all pass") != std::string::npos);
  // row order is by name whatever the launch order
  auto shuffled = run({"--seed", "7", "corpus"});
  CHECK(shuffled.out == all.out);

  auto ese2 = run({"corpus", "--filter", "ese2"});
  CHECK(ese2.code == 0);
  CHECK(ese2.out.find("2 fixtures") != std::string::npos);
  CHECK(ese2.out.find("ese2-sparse         NOT_QC        doubexp") != std::string::npos);
  CHECK(ese2.out.find("ese2-enclosed       MODULAR") != std::string::npos);

  auto ex4 = run({"corpus", "--filter", "example4"});
  CHECK(ex4.code == 0);
  CHECK(ex4.out.find("4 fixtures") != std::string::npos);

  // a drifted expectation fails, and --bless restores it
  std::string text = read(PANTSWORK_CORPUS_FILE);
  auto pos = text.find("ese1-x2 NOT_QC exp");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 18, "ese1-x2 NOT_QC sqrt");
  const std::string copy = scratch("corpus.txt", text);
  CHECK(run({"corpus", "--filter", "ese1", "--corpus", copy}).code == 1);
  CHECK(run({"corpus", "--filter", "ese1", "--corpus", copy, "--bless"}).code == 0);
  CHECK(read(copy) == read(PANTSWORK_CORPUS_FILE));
}
