#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sp/cli.hpp"

using namespace sp;

namespace {

std::string data(const std::string& name) { return std::string(SP_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("cli align: kittens matches golden") {
  auto r = run({"align", "--grammar", data("kittens.spg"), "--new", data("kittens.sp"), "--results", "1"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find(slurp(std::string(SP_GOLDEN_DIR) + "/kittens.txt")) != std::string::npos);
  CHECK(r.out.find("code: S PL 4 5 1 #S") != std::string::npos);
  CHECK(r.out.find("p_REL 1") != std::string::npos);
  CHECK(r.out.find("residue") == std::string::npos);
}

TEST_CASE("cli align: errors leave residue") {
  auto r = run({"align", "--grammar", data("kittens.spg"), "--new", data("kittens_errors.sp"), "--results", "1"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find(slurp(std::string(SP_GOLDEN_DIR) + "/kittens_errors.txt")) != std::string::npos);
  CHECK(r.out.find("residue: m@7 x@12") != std::string::npos);
}

TEST_CASE("cli align: audit trail written") {
  const auto dir = std::filesystem::temp_directory_path() / "spcm_cli_test";
  std::filesystem::create_directories(dir);
  const auto json = (dir / "audit.json").string(), text = (dir / "audit.txt").string();
  CHECK(run({"align", "--grammar", data("kittens.spg"), "--new", data("kittens.sp"), "--audit", json}).code == 0);
  CHECK(run({"align", "--grammar", data("kittens.spg"), "--new", data("kittens.sp"), "--audit", text}).code == 0);
  CHECK(slurp(json).front() == '[');
  CHECK(!slurp(text).empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli exit codes") {
  CHECK(run({"align", "--grammar", data("kittens.spg"), "--pattern", "q q q"}).code == kExitEmpty);
  CHECK(run({"reason", "--grammar", data("tweety.spg"), "--pattern", "zzz"}).code == kExitEmpty);
  auto missing = run({"align", "--grammar", data("no_such.spg"), "--pattern", "a"});
  CHECK(missing.code == kExitInputError);
  CHECK(missing.err.find("cannot open") != std::string::npos);
  CHECK(run({"align", "--grammar", data("kittens.spg")}).code == kExitInputError);
  CHECK(run({"bogus"}).code == kExitInputError);
  CHECK(run({}).code == kExitInputError);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"align", "--help"}).code == kExitOk);
  CHECK(run({"score"}).code == kExitInputError);
  CHECK(run({"score", "--entropy", "0.5,x"}).code == kExitInputError);
  CHECK(run({"align", "--grammar", data("kittens.spg"), "--pattern", "a", "--beam", "0"}).code == kExitInputError);
}

TEST_CASE("cli format error carries file and line") {
  const auto path = (std::filesystem::temp_directory_path() / "spcm_bad.spg").string();
  {
    std::ofstream f(path);
    f << "< a b >\n@0 < c d >\n";
  }
  auto r = run({"align", "--grammar", path, "--pattern", "a b"});
  CHECK(r.code == kExitInputError);
  CHECK(r.err.find("line 2") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("cli learn: john/mary") {
  const auto dir = std::filesystem::temp_directory_path() / "spcm_learn_test";
  std::filesystem::remove_all(dir);
  auto r = run({"learn", "--corpus", data("johnmary.sp"), "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("   1      271      152      423") != std::string::npos);
  CHECK(r.out.find("verbatim") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "grammar1.spg"));
  CHECK(slurp((dir / "grammar1.prov").string()).find("split") != std::string::npos);
  std::filesystem::remove_all(dir);

  const auto empty = (std::filesystem::temp_directory_path() / "spcm_empty.sp").string();
  { std::ofstream f(empty); f << "; nothing\n"; }
  CHECK(run({"learn", "--corpus", empty}).code == kExitInputError);
  std::filesystem::remove(empty);
}

TEST_CASE("cli reason: Tweety") {
  auto r = run({"reason", "--grammar", data("tweety.spg"), "--new", data("tweety_bird.sp")});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("reference set: 3 alignment(s)") != std::string::npos);
  CHECK(r.out.find("canfly") != std::string::npos);
  CHECK(r.out.find("p_REL 0.9377289377") != std::string::npos);
}

TEST_CASE("cli score values") {
  auto r = run({"score", "--entropy", "0.5,0.5", "--search-space", "10", "--redundancy", "2:3,1:4"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("entropy 1\n") != std::string::npos);
  CHECK(r.out.find("P=1023 C=522753") != std::string::npos);
  CHECK(r.out.find("redundancy 3\n") != std::string::npos);  // (2-1)*3 + (1-1)*4
  auto t = run({"score", "--grammar-T", "--grammar", data("johnmary_target.spg"), "--corpus", data("johnmary.sp")});
  REQUIRE(t.code == kExitOk);
  CHECK(t.out.find("T 423\n") != std::string::npos);
  CHECK(t.out.find("verbatim T 412") != std::string::npos);
  CHECK(run({"score", "--grammar-T", "--grammar", data("johnmary_target.spg")}).code == kExitInputError);
}
