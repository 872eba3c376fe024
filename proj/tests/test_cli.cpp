#include "doctest.h"
#include "commands.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace {

const std::string data_dir = OMEGARES_DATA_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = omegares::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string betti_line(const std::string& out) {
  auto pos = out.find("# betti: ");
  if (pos == std::string::npos) return "";
  auto end = out.find('\n', pos);
  return out.substr(pos + 9, end - pos - 9);
}

std::string fixture(const std::string& name) { return data_dir + "/fixtures/" + name + ".json"; }

}  // namespace

TEST_CASE("group loop homology tables") {
  CHECK(betti_line(run({"group", "C4", "--prime", "2", "--degree", "5"}).out) == "0:4, 1:0, 2:0, 3:0");
  CHECK(betti_line(run({"group", "C6", "-p", "2", "-N", "5"}).out) == "0:2, 1:0, 2:0, 3:0");
  CHECK(betti_line(run({"group", "S3", "-p", "2", "-N", "5"}).out) == "0:2, 1:0, 2:0, 3:0");
  auto r = run({"--prime", "2", "group", "C4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("degree\tdim\tstable\n0\t4\ttrue\n") != std::string::npos);
}

TEST_CASE("category frontend: resolution or refusal") {
  auto ok = run({"category", fixture("arrow_with_cyclic_loop_p2"), "--target", "y", "-N", "2"});
  CHECK(ok.code == 0);
  CHECK(betti_line(ok.out) == "0:1");
  auto no = run({"category", fixture("arrow_with_cyclic_loop_p3"), "--target", "x"});
  CHECK(no.code == 2);
  CHECK(no.out.find("# reason: L_1θ_*(θ^*X) ≠ 0") != std::string::npos);
}

TEST_CASE("check command") {
  auto good = run({"check", fixture("cyclic4_identity_complex"), "--complete"});
  CHECK(good.code == 0);
  auto bad = run({"check", fixture("unipotent_h1_complex"), "-N", "2"});
  CHECK(bad.code == 2);
  CHECK(bad.out.find("homology-pulled-back\t1\tfalse") != std::string::npos);
  CHECK(bad.out.find("# witness for homology-pulled-back") != std::string::npos);
  auto sul = run({"check", fixture("sullivan_p5_m2_L3")});
  CHECK(sul.code == 0);
  CHECK(sul.out.find("false") == std::string::npos);
}

TEST_CASE("torus-module commands") {
  CHECK(betti_line(run({"sullivan", "5", "2", "3"}).out) == "0:1, 1:0, 2:0, 3:1, 4:0");
  CHECK(betti_line(run({"sullivan", "5", "1", "3"}).out) == "0:1, 1:1, 2:0");
  auto t = run({"torus", "-p", "3", "--action", "[[[-1,0],[0,-1]]]", "-N", "9"});
  CHECK(t.code == 0);
  CHECK(betti_line(t.out) == "0:1, 1:0, 2:0, 3:3, 4:0, 5:0, 6:4, 7:0, 8:0, 9:4");
  auto threaded = run({"torus", "-p", "3", "--action", "-I", "-N", "9", "--threads", "2"});
  CHECK(betti_line(threaded.out) == betti_line(t.out));
  auto base = run({"torus", "-p", "3", "--rank", "2", "--level", "3", "--base"});
  CHECK(betti_line(base.out) == "0:1, 1:2, 2:1, 3:0");
  CHECK(run({"sullivan", "5", "3", "3"}).code == 1);  // 3 does not divide 4
}

TEST_CASE("strict mode turns unstable degrees into errors") {
  // level 2 has no level 0 build to compare against
  auto loose = run({"sullivan", "5", "2", "2"});
  CHECK(loose.code == 0);
  CHECK(loose.err.find("warning") != std::string::npos);
  CHECK(run({"--strict", "sullivan", "5", "2", "2"}).code == 1);
}

TEST_CASE("usage errors and determinism") {
  CHECK(run({"group", "C4", "--prime", "4"}).code == 1);
  CHECK(run({"nonsense"}).code == 1);
  CHECK(run({"group", "C4"}).code == 1);  // --prime missing
  CHECK(run({"--help"}).code == 0);
  auto a = run({"group", "S3", "-p", "3", "-N", "4", "--format", "json"});
  auto b = run({"group", "S3", "-p", "3", "-N", "4", "--format", "json"});
  CHECK(a.out == b.out);
  auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["command"] == "group");
  CHECK(doc["betti"].size() == 3);
  CHECK(doc["certificate"]["all_pass"] == true);
  auto seeded = run({"group", "S3", "-p", "3", "-N", "4", "--seed", "7", "--format", "json"});
  CHECK(nlohmann::json::parse(seeded.out)["betti"] == doc["betti"]);
}
