#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace collatz {

// A raised parse/validation problem that should reach the user verbatim,
// with a nonzero exit status.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One experiment invocation: a subcommand plus flat string parameters.
// Values stay textual here; run() parses them through the per-subcommand
// schema so that render/parse round-trips exactly.
struct ExperimentConfig {
  std::string subcommand;
  std::map<std::string, std::string> params;

  bool operator==(const ExperimentConfig&) const = default;
};

// argv -> config. argv[0] is the subcommand name (or --config must supply
// one); later --key value flags override config-file entries. Unknown
// subcommands, unknown keys, malformed rationals and inverted ranges each
// fail with their own message.
ExperimentConfig parse_config(const std::vector<std::string>& args);

// Flat key=value text ('#' comments and blank lines allowed; must contain
// subcommand=...).
ExperimentConfig parse_config_text(const std::string& text);

// Canonical flat key=value rendering; parse_config_text(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

// The config echoed into output headers and hashed for the cache: execution
// knobs (threads, output, cache_dir) removed, keys sorted. Byte-identical
// payloads across thread counts depend on this.
std::string canonical_config(const ExperimentConfig& config);

struct RunRecord {
  ExperimentConfig config;
  std::string payload;       // full output file contents (CSV or JSON)
  std::string version;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0; // never serialized into the payload
  bool cached = false;
};

// Validates against the schema, dispatches to the library, renders the
// payload. Deterministic: identical canonical config => identical payload.
RunRecord run(const ExperimentConfig& config);

// Content-addressed store of finished runs. Lookup hits only on an exact
// canonical-config + format + version match; corrupt entries are ignored
// with a warning. Stores are atomic (temp file + rename).
class ResultCache {
 public:
  explicit ResultCache(std::string directory) : dir_(std::move(directory)) {}

  std::optional<RunRecord> lookup(const ExperimentConfig& config) const;
  void store(const RunRecord& record) const;

  const std::string& directory() const { return dir_; }

 private:
  std::string key_path(const ExperimentConfig& config) const;
  std::string dir_;
};

// Cache-aware wrapper: serve a prior record when possible, else run and
// store. cache_dir empty => caching disabled.
RunRecord run_with_cache(const ExperimentConfig& config, const std::string& cache_dir);

// Subcommand names, for usage/help.
const std::vector<std::string>& known_subcommands();

}  // namespace collatz
