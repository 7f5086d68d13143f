#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path corpus_dir = GRADIENTLAB_SOURCE_DIR "/corpus";
const fs::path data_dir = GRADIENTLAB_SOURCE_DIR "/tests/data";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = gradientlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path(const fs::path& dir, const char* name) { return (dir / name).string(); }

nlohmann::json run_json(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("json");
  auto r = run(args);
  REQUIRE(r.code == 0);
  return nlohmann::json::parse(r.out);
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("gradientlab_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("usage errors exit 64") {
  CHECK(run({}).code == 64);
  CHECK(run({"frobnicate"}).code == 64);
  CHECK(run({"gradient"}).code == 64);
  CHECK(run({"gradient", "--pres", path(corpus_dir, "f2.grp"), "--bogus"}).code == 64);
  CHECK(run({"gradient", "--pres", path(corpus_dir, "f2.grp"), "-p", "4"}).code == 64);
  CHECK(run({"gradient", "--pres", path(corpus_dir, "f2.grp"), "--mode", "xyz"}).code == 64);
  CHECK(run({"subgroups", "--pres", path(corpus_dir, "f2.grp"), "--max-index", "65"}).code == 64);
  CHECK(run({"chain", "--pres", path(corpus_dir, "f2.grp"), "--depth", "9"}).code == 64);
  CHECK(run({"parse", "--pres", path(corpus_dir, "missing.grp")}).code == 64);
  CHECK(run({"parse"}).code == 64);
  CHECK(run({"verify", "amalgam", "--spec", path(corpus_dir, "z2.hnn")}).code == 64);
  CHECK(run({"example45", "--r", "0"}).code == 64);
  auto bad = run({"parse", "--pres", path(data_dir, "malformed.grp")});
  CHECK(bad.code == 64);
  CHECK(bad.err.find("malformed.grp:2:14:") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("max-index cap lifts with --unsafe-limits") {
  auto r = run({"subgroups", "--pres", path(corpus_dir, "z2.grp"), "--max-index", "80", "--unsafe-limits"});
  CHECK(r.code == 0);
}

TEST_CASE("p-gradient of the infinite dihedral group") {
  auto j = run_json({"gradient", "--pres", path(corpus_dir, "zpzp.grp"), "--mode", "rgp", "-p", "2", "--depth", "4"});
  CHECK(j["schema"] == 1);
  REQUIRE(j["levels"].size() == 5);
  for (std::size_t k = 1; k < 5; ++k) {
    CHECK(j["levels"][k]["value"]["lo"] == "0");
    CHECK(j["levels"][k]["value"]["hi"] == "0");
  }
  CHECK(j["running_inf"]["hi"] == "0");
  auto csv = run({"gradient", "--pres", path(corpus_dir, "zpzp.grp"), "--mode", "rgp", "--format", "csv"});
  CHECK(csv.out.find("4,32,1,1,0,0,0,0\n") != std::string::npos);
}

TEST_CASE("free product verification from files") {
  auto j = run_json({"verify", "free-product", "--left", path(corpus_dir, "z2.grp"), "--right",
                     path(corpus_dir, "z3.grp"), "--max-index", "12"});
  CHECK(j["verdict"]["status"] == "consistent");
  CHECK(j["verdict"]["rhs"]["lo"] == "1/6");
  CHECK(j["product"]["witness"]["index"] == 6);
  CHECK(j["product"]["upper_bound"] == "1/6");
  auto pretty = run({"verify", "free-product", "--left", path(corpus_dir, "z2.grp"), "--right",
                     path(corpus_dir, "z3.grp"), "--max-index", "12"});
  CHECK(pretty.out.find("witness: index 6") != std::string::npos);
}

TEST_CASE("graph of groups verification and exit codes") {
  auto hnn = run_json({"verify", "hnn", "--spec", path(corpus_dir, "z2.hnn"), "--depth", "4"});
  CHECK(hnn["verdicts"][0]["status"] == "consistent");
  CHECK(hnn["verdicts"][0]["lhs"]["hi"] == "1/256");
  auto lie = run({"verify", "amalgam", "--spec", path(data_dir, "false_amenable.amal"), "--mode", "rgp", "-p",
                  "3", "--depth", "1"});
  CHECK(lie.code == 2);
  CHECK(lie.out.find("verdict: violated") != std::string::npos);
  auto tiny = run({"verify", "hnn", "--spec", path(corpus_dir, "z2.hnn"), "--max-cosets", "3"});
  CHECK(tiny.code == 3);
  auto dp = run_json({"verify", "dp-bounds", "--spec", path(corpus_dir, "trefoil.amal"), "-p", "3"});
  CHECK(dp["verdict"] == "holds");
  auto k = run_json({"kurosh", "--spec", path(corpus_dir, "z4z4.amal"), "--max-index", "12"});
  CHECK(k["verdict"] == "holds");
}

TEST_CASE("naive amalgam command") {
  auto j = run_json({"example45", "--r", "7"});
  CHECK(j["naive"] == "-1");
  CHECK(j["note"].get<std::string>().find("RG >= -1") != std::string::npos);
  CHECK(run_json({"example45", "--r", "13"})["naive"] == "-2");
}

TEST_CASE("cost command") {
  auto j = run_json({"cost", "--pres", path(corpus_dir, "z2z3.grp"), "--max-index", "6", "--seed", "5"});
  CHECK(j["verdict"] == "holds");
  bool saw = false;
  for (const auto& row : j["rows"])
    if (row["index"] == 6 && row["l"] == "b") {
      saw = true;
      CHECK(row["cost"]["orbit_count"] == 2);
      CHECK(row["cost"]["min_cost"] == "2/3");
    }
  CHECK(saw);
}

TEST_CASE("output is byte-identical across runs") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"corpus", corpus_dir.string(), "--format", "json"},
           {"cost", "--pres", path(corpus_dir, "z2z3.grp"), "--format", "json"},
           {"verify", "amalgam", "--spec", path(corpus_dir, "trefoil.amal"), "--format", "json"}}) {
    auto a = run(args), b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("--out writes the report to a file") {
  auto dir = scratch("out");
  auto file = (dir / "r.json").string();
  auto r = run({"example45", "--r", "7", "--format", "json", "--out", file});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(file);
  CHECK(nlohmann::json::parse(in)["naive"] == "-1");
  fs::remove_all(dir);
}

TEST_CASE("corpus runs") {
  auto j = run_json({"corpus", corpus_dir.string()});
  REQUIRE(j["rows"].size() == 12);
  for (const auto& row : j["rows"])
    CHECK_MESSAGE(row["status"] == "consistent", row["file"]);

  auto empty = scratch("empty");
  auto e = run({"corpus", empty.string(), "--format", "json"});
  CHECK(e.code == 0);
  CHECK(nlohmann::json::parse(e.out)["rows"].empty());

  auto mixed = scratch("mixed");
  fs::copy_file(corpus_dir / "z2.grp", mixed / "a.grp");
  fs::copy_file(data_dir / "malformed.grp", mixed / "b.grp");
  fs::copy_file(corpus_dir / "z4z4.amal", mixed / "c.amal");
  auto m = run({"corpus", mixed.string(), "--format", "json"});
  CHECK(m.code == 1);
  auto rows = nlohmann::json::parse(m.out)["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["status"] == "consistent");
  CHECK(rows[1]["status"] == "error");
  CHECK(rows[2]["status"] == "consistent");

  fs::copy_file(data_dir / "false_amenable.amal", mixed / "d.amal");
  CHECK(run({"corpus", mixed.string(), "--mode", "rgp", "-p", "3", "--depth", "1"}).code == 2);
  fs::remove_all(empty);
  fs::remove_all(mixed);
  CHECK(run({"corpus", (corpus_dir / "nowhere").string()}).code == 64);
}
