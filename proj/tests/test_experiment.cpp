#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "perclab/error.hpp"
#include "perclab/experiment.hpp"

using namespace perclab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json small_config(const std::string& out) {
  return json{{"name", "small"},
              {"graph", {{"family", "planted"}, {"d", 2}, {"r", 3}}},
              {"p", {0.2, "1/4"}},
              {"seed", 11},
              {"n_samples", 3000},
              {"size_cap", 500},
              {"analyses", {{"tail", true}, {"compare", true}, {"fits", {{{"model", "exp"}}, {{"model", "power"}}}}}},
              {"workers", 2},
              {"out_dir", out}};
}

std::string error_text(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
    return e.what();
  }
  return {};
}

int cli(const std::string& args) {
  const auto status = std::system((std::string(PERCLAB_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("git blob hash") {
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("config validation names every bad field") {
  const auto good = small_config("x");
  CHECK_NOTHROW(parse_config(good));
  CHECK(parse_config(good).batches.size() == 2);
  CHECK(parse_config(good).batches[1].p == doctest::Approx(0.25));

  auto bad = good;
  bad["p"] = 1.5;
  bad["n_samples"] = 0;
  bad["colour"] = "red";
  bad["analyses"]["fits"][0]["model"] = "cubic";
  const auto msg = error_text(bad);
  CHECK(msg.find("p:") != std::string::npos);
  CHECK(msg.find("n_samples") != std::string::npos);
  CHECK(msg.find("colour: unknown field") != std::string::npos);
  CHECK(msg.find("analyses.fits[0]") != std::string::npos);

  auto no_graph = good;
  no_graph.erase("graph");
  CHECK(error_text(no_graph).find("graph") != std::string::npos);
  auto no_p = good;
  no_p.erase("p");
  CHECK(error_text(no_p).find("p:") != std::string::npos);
  auto comp = good;
  comp["sampler"] = "compositional";
  comp["graph"] = {{"family", "grid"}, {"d", 2}, {"radius", 5}};
  CHECK(error_text(comp).find("sampler") != std::string::npos);
  CHECK_THROWS_AS(load_config("does/not/exist.json"), Error);
}

TEST_CASE("batches override shared fields") {
  auto j = small_config("x");
  j.erase("p");
  j["batches"] = {{{"p", 0.1}}, {{"p", "1/3"}, {"n_samples", 7}, {"size_cap", 9}, {"seed", 2}}};
  const auto c = parse_config(j);
  REQUIRE(c.batches.size() == 2);
  CHECK(c.batches[0].n_samples == 3000);
  CHECK(c.batches[0].seed == 11);
  CHECK(c.batches[1].n_samples == 7);
  CHECK(c.batches[1].size_cap == 9);
  CHECK(c.batches[1].seed == 2);
}

TEST_CASE("run writes one record and tail per p, and replays identically") {
  const fs::path out = "experiment_run";
  fs::remove_all(out);
  const auto result = run_experiment(parse_config(small_config(out.string())));
  CHECK(result.failures.empty());
  const auto& m = result.manifest;
  REQUIRE(m.at("records").size() == 2);
  for (const auto& rec : m.at("records")) {
    CHECK(rec.at("hash").get<std::string>().size() == 40);
    CHECK(fs::exists(out / rec.at("tail_csv").get<std::string>()));
  }
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "fits.csv"));
  const auto hs = read_histograms(out / "histograms.jsonl");
  REQUIRE(hs.size() == 2);
  CHECK(histogram_hash(hs[0]) == m.at("records")[0].at("hash"));
  CHECK(hs[0].n_samples == 3000);
  CHECK(m.at("verdicts").size() == 2);

  std::ifstream tail(out / m.at("records")[0].at("tail_csv").get<std::string>());
  std::string header;
  std::getline(tail, header);
  CHECK(header == "n,tail,se");

  const auto replay = replay_manifest(out / "manifest.json", "experiment_replay");
  CHECK(replay.identical);
  CHECK(replay.mismatches.empty());
  fs::remove_all("experiment_replay");
  fs::remove_all(out);
}

TEST_CASE("preset parses") {
  const auto c = parse_config(preset_config("one_regime_d2_r3"));
  CHECK(c.graph.family == Family::planted);
  CHECK(c.batches.size() == 3);
  CHECK(c.batches[1].p == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(preset_config("nope"), Error);
}

TEST_CASE("oracle suite passes and catches an injected fault") {
  const auto rows = oracle_suite();
  CHECK(rows.size() >= 5);
  for (const auto& r : rows) CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);
  OracleOptions bad;
  bad.corrupt_dwass = true;
  bool any_failed = false;
  for (const auto& r : oracle_suite(bad)) any_failed = any_failed || !r.passed;
  CHECK(any_failed);
}

TEST_CASE("command line exit codes") {
  CHECK(cli("generate --graph '{\"family\":\"grid\",\"d\":2,\"radius\":3}'") == 0);
  CHECK(cli("sample --graph '{\"family\":\"rooted_tree\",\"r\":2}' --p 0.3 --samples 100") == 0);
  CHECK(cli("sample --graph '{\"family\":\"rooted_tree\",\"r\":2}' --p 1.5 --samples 100") == 1);
  CHECK(cli("gw --offspring binomial:2,0.3 --n-max 20") == 0);
  CHECK(cli("translate --group lamplighter --radius 8 --a '[[0],[0,0]]'") == 0);
  CHECK(cli("translate --group lamplighter --radius 8 --a '[\"(0)\"]' --b '[[0,0]]'") == 0);
  CHECK(cli("translate --group lamplighter --radius 4 --a '[{}]'") == 1);
  CHECK(cli("no-such-command") == 1);
  CHECK(cli("exact --graph '{\"family\":\"grid\",\"d\":2,\"radius\":2}' --p 0.3 --n-max 6") == 2);
  CHECK(cli("oracle-suite") == 0);
  CHECK(cli("oracle-suite --inject-fault dwass") == 3);
}
