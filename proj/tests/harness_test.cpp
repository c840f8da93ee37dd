#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "collatz/harness.hpp"
#include "collatz/version.hpp"

using namespace collatz;
using nlohmann::ordered_json;

namespace {

ExperimentConfig make(std::string sub,
                      std::vector<std::pair<std::string, std::string>> kv) {
  ExperimentConfig c;
  c.subcommand = std::move(sub);
  for (auto& [k, v] : kv) c.params[k] = v;
  return c;
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::string message_of(const std::vector<std::string>& args) {
  try {
    parse_config(args);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("collatz-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("flag parsing builds the expected config") {
  const ExperimentConfig c = parse_config({"census", "--m", "12", "--d", "3/5"});
  CHECK(c == make("census", {{"m", "12"}, {"d", "3/5"}}));
  // Dashes in flags map to underscores in keys.
  const ExperimentConfig s =
      parse_config({"mscan", "--range", "3..10", "--min-k", "2"});
  CHECK(s.params.at("min_k") == "2");
}

TEST_CASE("config text round-trips through render and parse") {
  const std::vector<ExperimentConfig> configs = {
      make("census", {{"m", "2..6,9"}, {"d", "1/2,3/5"}, {"cmp", "both"}}),
      make("mscan", {{"a", "1/8"}, {"range", "3..1000"}, {"cap", "77"}}),
      make("traj", {{"n", "27"}}),
  };
  for (const auto& c : configs) CHECK(parse_config_text(render_config(c)) == c);
}

TEST_CASE("render_config is exact and sorted") {
  CHECK(render_config(make("traj", {{"n", "27"}, {"cap", "100"}})) ==
        "subcommand=traj\ncap=100\nn=27\n");
}

TEST_CASE("canonical config drops execution knobs but keeps format") {
  const ExperimentConfig c = make(
      "census", {{"m", "2"}, {"d", "1/2"}, {"threads", "8"}, {"output", "x.csv"},
                 {"cache_dir", "/tmp/c"}, {"format", "json"}});
  CHECK(canonical_config(c) == "subcommand=census\nd=1/2\nformat=json\nm=2\n");
}

TEST_CASE("config text parse errors") {
  CHECK_THROWS_AS(parse_config_text("m=2\n"), ConfigError);  // no subcommand
  CHECK_THROWS_AS(parse_config_text("subcommand=traj\nnonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("subcommand=traj\nn=1\nn=2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("subcommand=traj\nsubcommand=census\n"),
                  ConfigError);
}

TEST_CASE("validation messages name the offending flag") {
  CHECK(message_of({"frobnicate"}).find("unknown subcommand 'frobnicate'") !=
        std::string::npos);
  CHECK(message_of({"census", "--bogus", "1", "--m", "2", "--d", "1/2"})
            .find("unknown key 'bogus'") != std::string::npos);
  CHECK(message_of({"census", "--m", "4"}).find("requires --d") != std::string::npos);
  CHECK(message_of({"census", "--m", "4", "--d", "0.6"}).find("fraction") !=
        std::string::npos);
  CHECK(message_of({"mscan", "--range", "9..3"}).find("inverted") != std::string::npos);
  CHECK(message_of({"census", "--m", "99", "--d", "1/2"})
            .find("exceeds the enumeration guard 28") != std::string::npos);
  CHECK(message_of({"himage", "--a", "1"}).find("exactly one of") != std::string::npos);
  CHECK(message_of({"himage", "--elements", "1,2", "--range", "1..4"})
            .find("exactly one of") != std::string::npos);
}

TEST_CASE("config file feeds defaults that flags override") {
  TempDir dir;
  const auto path = dir.path / "census.cfg";
  {
    std::ofstream out(path);
    out << "# example run\nsubcommand=census\nm=12\nd=3/5\n";
  }
  const ExperimentConfig base = parse_config({"--config", path.string()});
  CHECK(base == make("census", {{"m", "12"}, {"d", "3/5"}}));
  const ExperimentConfig tweaked =
      parse_config({"--config", path.string(), "--m", "4"});
  CHECK(tweaked.params.at("m") == "4");
  CHECK_THROWS_AS(parse_config({"oracle", "--config", path.string()}), ConfigError);
}

TEST_CASE("census payload is pinned byte for byte") {
  const RunRecord r = run(make("census", {{"m", "12"}, {"d", "3/5"}}));
  CHECK(r.payload ==
        "# collatz-density-lab " + std::string(kVersion) + "\n"
        "# subcommand=census\n"
        "# d=3/5\n"
        "# m=12\n"
        "# seed=0\n"
        "m,d_num,d_den,variant,cmp,window_base,count,total,ratio_decimal\n"
        "12,3,5,exclusive,strict,0,3302,4096,0.806152343750\n");
  CHECK_FALSE(r.cached);
  CHECK(r.version == kVersion);
}

TEST_CASE("list parameters expand to one row per combination") {
  const RunRecord r = run(make(
      "census", {{"m", "2..6,9"}, {"d", "1/2"}, {"format", "json"}}));
  const ordered_json j = ordered_json::parse(r.payload);
  CHECK(j.at("rows").size() == 6);
  CHECK(j.at("rows")[0][0] == "2");
  CHECK(j.at("rows")[5][0] == "9");
  CHECK(j.at("tool") == "collatz-density-lab");
  CHECK(j.at("config").at("m") == "2..6,9");
}

TEST_CASE("bijection row is frozen") {
  const RunRecord r = run(make("bijection", {{"k", "8"}}));
  CHECK(r.payload.find("8,256,256,true,true,true\n") != std::string::npos);
}

TEST_CASE("payload ignores the thread count") {
  const ExperimentConfig base = make("census", {{"m", "14"}, {"d", "3/5"}});
  ExperimentConfig threaded = base;
  threaded.params["threads"] = "5";
  CHECK(run(base).payload == run(threaded).payload);
}

TEST_CASE("mscan json mirrors the csv schema plus the unresolved array") {
  const RunRecord r = run(make(
      "mscan", {{"a", "1/8"}, {"range", "3..40"}, {"cap", "100"}, {"format", "json"}}));
  const ordered_json j = ordered_json::parse(r.payload);
  CHECK(j.at("columns") ==
        ordered_json({"a_num", "a_den", "b_num", "b_den", "lo", "hi", "cap",
                      "resolved", "unresolved_count", "fraction"}));
  CHECK(j.at("unresolved") == ordered_json::array());
  CHECK(j.at("excluded") == "6");
  const auto& row = j.at("rows")[0];
  CHECK(row[7] == "32");
  CHECK(row[8] == "0");
  CHECK(row[9] == "1/1");
}

TEST_CASE("seed is echoed exactly once") {
  const RunRecord defaulted = run(make("check-cardinality",
                                       {{"n", "256"}, {"trials", "2"}, {"m", "3"}}));
  CHECK(count_substr(defaulted.payload, "# seed=0") == 1);
  const RunRecord seeded = run(make(
      "check-cardinality", {{"n", "256"}, {"trials", "2"}, {"m", "3"}, {"seed", "5"}}));
  CHECK(count_substr(seeded.payload, "# seed=5") == 1);
  CHECK(seeded.seed == 5);
}

TEST_CASE("library precondition failures surface as config errors") {
  CHECK_THROWS_AS(
      run(make("lemma2",
               {{"m", "16"}, {"d", "3/5"}, {"range", "1048576..1048600"}})),
      ConfigError);
}

TEST_CASE("cache serves exact repeats and survives corruption") {
  TempDir dir;
  const ExperimentConfig c = make(
      "check-cardinality",
      {{"n", "512"}, {"p", "1/4"}, {"trials", "2"}, {"m", "4"}, {"seed", "7"}});

  const RunRecord first = run_with_cache(c, dir.path.string());
  CHECK_FALSE(first.cached);
  const RunRecord second = run_with_cache(c, dir.path.string());
  CHECK(second.cached);
  CHECK(second.payload == first.payload);
  CHECK(second.seed == first.seed);

  // A different seed is a different canonical config: no false hit.
  ExperimentConfig other = c;
  other.params["seed"] = "8";
  CHECK_FALSE(run_with_cache(other, dir.path.string()).cached);

  // Corrupt every entry; lookups must fall back to recomputation.
  for (const auto& entry : std::filesystem::directory_iterator(dir.path)) {
    std::ofstream out(entry.path(), std::ios::trunc);
    out << "not json";
  }
  const RunRecord recomputed = run_with_cache(c, dir.path.string());
  CHECK_FALSE(recomputed.cached);
  CHECK(recomputed.payload == first.payload);
  CHECK(run_with_cache(c, dir.path.string()).cached);

  // Empty directory string disables caching entirely.
  CHECK_FALSE(run_with_cache(c, "").cached);
  CHECK_FALSE(run_with_cache(c, "").cached);
}

TEST_CASE("threads and format are accepted everywhere, output never hashed") {
  TempDir dir;
  const ExperimentConfig a =
      make("traj", {{"n", "27"}, {"output", "a.csv"}, {"threads", "2"}});
  const ExperimentConfig b = make("traj", {{"n", "27"}, {"output", "b.csv"}});
  CHECK_FALSE(run_with_cache(a, dir.path.string()).cached);
  CHECK(run_with_cache(b, dir.path.string()).cached);  // same canonical config
}

TEST_CASE("known subcommands list the full surface") {
  const auto& names = known_subcommands();
  CHECK(names.size() == 10);
  for (const char* expected :
       {"traj", "census", "oracle", "bijection", "lemma2", "mscan", "himage",
        "profile", "check-inclusions", "check-cardinality"}) {
    bool found = false;
    for (const auto& name : names) found = found || name == expected;
    CHECK_MESSAGE(found, expected);
  }
}
