#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "ndn/core/io.hpp"
#include "ndn/harness/cli.hpp"
#include "ndn/harness/config.hpp"
#include "support/tempdir.hpp"
#include "support/toy_model.hpp"

using namespace ndn;
using namespace ndn::harness;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

size_t count_files(const fs::path& dir, const std::string& prefix) {
  size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().filename().string().rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST_CASE("synth writes the corpus and a manifest") {
  testing::TempDir dir;
  const Run r = cli({"synth", "--grammar", "banner-ad", "--n", "10", "--seed", "3", "--out", dir.path().string()});
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(dir.path() / "manifest.json"));
  size_t layouts = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) layouts += e.path().filename() != "manifest.json";
  CHECK(layouts == 10);
  CHECK(cli({"synth", "--grammar", "magazine", "--out", dir.path().string()}).code == kExitInvalid);
}

TEST_CASE("bad invocations exit with 1") {
  testing::TempDir dir;
  CHECK(cli({"generate", "--out", dir.path().string()}).code == kExitInvalid);
  CHECK(cli({"synth", "--out", dir.path().string(), "--frobnicate"}).code == kExitInvalid);
  CHECK(cli({"launch"}).code == kExitInvalid);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("runtime failures exit with 2") {
  testing::TempDir dir;
  write_text_file((dir.path() / "c.json").string(), R"({"components":["text","image"]})");
  const Run r = cli({"generate", "--constraints", (dir.path() / "c.json").string(), "--checkpoint",
                     (dir.path() / "missing").string(), "--out", (dir.path() / "o").string()});
  CHECK(r.code == kExitRuntime);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("synth, train, generate, complete, recommend, refine and eval end to end") {
  testing::TempDir dir;
  const std::string data = (dir.path() / "data").string();
  const std::string ckpt = (dir.path() / "ckpt").string();
  REQUIRE(cli({"synth", "--n", "150", "--seed", "2", "--out", data}).code == kExitOk);

  const std::string config = (dir.path() / "config.json").string();
  write_text_file(config, to_json(testing::toy_config()).dump());
  const Run train = cli({"train", "--dataset", data, "--out", ckpt, "--config", config, "--relnet-steps", "10"});
  REQUIRE_MESSAGE(train.code == kExitOk, train.err);
  CHECK(fs::exists(fs::path(ckpt) / "manifest.json"));
  CHECK(fs::exists(fs::path(ckpt) / "logs" / "loss_relnet.csv"));

  const std::string cons = (dir.path() / "cons.json").string();
  write_text_file(cons, R"({"components":["toolbar","image","button"],"loc":[[0,"above",1]]})");
  const std::string gen = (dir.path() / "gen").string();
  const Run g = cli({"generate", "--checkpoint", ckpt, "--constraints", cons, "--samples", "3", "--fixed-size",
                     "2:0.3:0.05", "--out", gen});
  REQUIRE_MESSAGE(g.code == kExitOk, g.err);
  CHECK(count_files(gen, "sample_") == 3);
  CHECK(count_files(gen, "graph_") == 3);
  const Layout first = deserialize_layout(read_text_file((fs::path(gen) / "sample_000.json").string()),
                                          CategoryTable::standard());
  CHECK(first.components[2].box.w == doctest::Approx(0.3));
  CHECK(first.components[2].box.h == doctest::Approx(0.05));
  CHECK(cli({"generate", "--checkpoint", ckpt, "--constraints", cons, "--fixed-size", "2-0.3", "--out", gen}).code ==
        kExitInvalid);

  const std::string completed = (dir.path() / "completed.json").string();
  REQUIRE(cli({"complete", "--checkpoint", ckpt, "--constraints", cons, "--out", completed}).code == kExitOk);
  CHECK(deserialize_constraints(read_text_file(completed), CategoryTable::standard()).graph.is_complete());

  const std::string refined = (dir.path() / "refined.json").string();
  REQUIRE(cli({"refine", "--checkpoint", ckpt, "--layout", (fs::path(gen) / "sample_000.json").string(), "--out",
               refined})
              .code == kExitOk);

  const std::string placed = (dir.path() / "placed.json").string();
  write_text_file(placed, R"({"canvas_px":[1080,1920],"components":[{"category":"toolbar","bbox":[0,0,1,0.08]}]})");
  const std::string rec = (dir.path() / "rec.json").string();
  REQUIRE(cli({"recommend", "--checkpoint", ckpt, "--layout", placed, "--target", "button", "--target", "text",
               "--out", rec})
              .code == kExitOk);
  CHECK(deserialize_layout(read_text_file(rec), CategoryTable::standard()).size() == 3);

  const std::string report = (dir.path() / "report.json").string();
  const Run e = cli({"eval", "--checkpoint", ckpt, "--dataset", data, "--report", report, "--samples", "1",
                     "--max-designs", "3", "--ablation"});
  REQUIRE_MESSAGE(e.code == kExitOk, e.err);
  const auto j = nlohmann::json::parse(read_text_file(report));
  CHECK(j.contains("ablation"));
  CHECK(j["ablation"].size() == 7);
}
