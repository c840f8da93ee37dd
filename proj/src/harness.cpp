#include "collatz/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "collatz/census.hpp"
#include "collatz/density.hpp"
#include "collatz/parallel.hpp"
#include "collatz/rng.hpp"
#include "collatz/trajectory.hpp"
#include "collatz/version.hpp"

namespace collatz {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kMaxListItems = 100000;    // expanded count/rational lists
constexpr std::uint64_t kMaxSetItems = 10000000;   // materialized sets and scans
constexpr std::uint64_t kMaxAuditPoints = 10000000;

const char* kToolName = "collatz-density-lab";

std::string display_key(const std::string& key) {
  std::string out = "--" + key;
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

[[noreturn]] void fail_key(const std::string& key, const std::string& what) {
  throw ConfigError(display_key(key) + ": " + what);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  if (value.empty()) fail_key(key, "empty count");
  for (char c : value)
    if (c < '0' || c > '9') fail_key(key, "'" + value + "' is not a non-negative integer");
  if (value.size() > 20) fail_key(key, "'" + value + "' does not fit in 64 bits");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (errno != 0 || end != value.c_str() + value.size())
    fail_key(key, "'" + value + "' does not fit in 64 bits");
  return static_cast<std::uint64_t>(v);
}

Natural parse_nat(const std::string& key, const std::string& value) {
  try {
    return natural_from_string(value);
  } catch (const std::invalid_argument& e) {
    fail_key(key, e.what());
  }
}

Rational parse_rat(const std::string& key, const std::string& value) {
  try {
    return parse_rational(value);
  } catch (const std::invalid_argument& e) {
    fail_key(key, e.what());
  }
}

std::pair<Natural, Natural> parse_range(const std::string& key, const std::string& value) {
  const std::size_t dots = value.find("..");
  if (dots == std::string::npos)
    fail_key(key, "'" + value + "' is not a range; expected lo..hi");
  const Natural lo = parse_nat(key, value.substr(0, dots));
  const Natural hi = parse_nat(key, value.substr(dots + 2));
  if (lo > hi)
    fail_key(key, "range '" + value + "' is inverted (lo > hi)");
  return {lo, hi};
}

// Comma-separated counts; each item is a value or an ascending span a..b.
std::vector<std::uint64_t> parse_count_list(const std::string& key,
                                            const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : split(value, ',')) {
    const std::size_t dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(key, item));
    } else {
      const std::uint64_t a = parse_count(key, item.substr(0, dots));
      const std::uint64_t b = parse_count(key, item.substr(dots + 2));
      if (a > b) fail_key(key, "range '" + item + "' is inverted (lo > hi)");
      if (b - a + 1 > kMaxListItems) fail_key(key, "list too long");
      for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
    }
    if (out.size() > kMaxListItems) fail_key(key, "list too long");
  }
  if (out.empty()) fail_key(key, "empty list");
  return out;
}

std::vector<Natural> parse_nat_list(const std::string& key, const std::string& value) {
  std::vector<Natural> out;
  for (const std::string& item : split(value, ',')) {
    const std::size_t dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_nat(key, item));
    } else {
      const Natural a = parse_nat(key, item.substr(0, dots));
      const Natural b = parse_nat(key, item.substr(dots + 2));
      if (a > b) fail_key(key, "range '" + item + "' is inverted (lo > hi)");
      const Natural len = b - a + 1;
      if (!fits_u64(len) || to_u64(len) > kMaxListItems)
        fail_key(key, "list too long");
      for (Natural v = a; v <= b; ++v) out.push_back(v);
    }
    if (out.size() > kMaxListItems) fail_key(key, "list too long");
  }
  if (out.empty()) fail_key(key, "empty list");
  return out;
}

std::vector<Rational> parse_rat_list(const std::string& key, const std::string& value) {
  std::vector<Rational> out;
  for (const std::string& item : split(value, ',')) out.push_back(parse_rat(key, item));
  if (out.empty()) fail_key(key, "empty list");
  return out;
}

ParityVariant parse_variant(const std::string& key, const std::string& value) {
  if (value == "exclusive") return ParityVariant::Exclusive;
  if (value == "inclusive") return ParityVariant::Inclusive;
  fail_key(key, "'" + value + "' is not a parity variant (exclusive|inclusive)");
}

std::vector<Comparator> parse_cmp(const std::string& key, const std::string& value) {
  if (value == "strict") return {Comparator::Strict};
  if (value == "weak") return {Comparator::Weak};
  if (value == "both") return {Comparator::Strict, Comparator::Weak};
  fail_key(key, "'" + value + "' is not a comparator (strict|weak|both)");
}

// ---------------------------------------------------------------------------
// Schema

enum class Kind {
  Count, CountList, Nat, NatList, Rat, RatNonNegList, RatPos, Prob,
  Range, Variant, Cmp, Family, Text,
};

struct KeySpec {
  Kind kind;
  bool required = false;
  std::uint64_t min = 0;  // lower bound for Count/CountList/Nat values
};

using Schema = std::map<std::string, KeySpec>;

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> table = {
      {"traj",
       {{"n", {Kind::Nat, true, 1}}, {"cap", {Kind::Count, false, 1}}}},
      {"census",
       {{"m", {Kind::CountList, true, 1}},
        {"d", {Kind::RatNonNegList, true}},
        {"variant", {Kind::Variant}},
        {"cmp", {Kind::Cmp}},
        {"base", {Kind::Nat}}}},
      {"oracle",
       {{"m", {Kind::CountList, true, 1}},
        {"d", {Kind::RatNonNegList, true}},
        {"variant", {Kind::Variant}},
        {"cmp", {Kind::Cmp}}}},
      {"bijection", {{"k", {Kind::Count, true, 1}}}},
      {"lemma2",
       {{"m", {Kind::Count, true, 3}},
        {"d", {Kind::RatPos, true}},
        {"variant", {Kind::Variant}},
        {"range", {Kind::Range, true}},
        {"sample", {Kind::Count}},
        {"seed", {Kind::Count}}}},
      {"mscan",
       {{"a", {Kind::RatPos}},
        {"b", {Kind::RatPos}},
        {"range", {Kind::Range, true}},
        {"cap", {Kind::Count, false, 1}},
        {"min_k", {Kind::Count}}}},
      {"himage",
       {{"elements", {Kind::NatList, false, 1}},
        {"range", {Kind::Range}},
        {"a", {Kind::RatPos}},
        {"b", {Kind::RatPos}},
        {"cap", {Kind::Count, false, 1}}}},
      {"profile",
       {{"family", {Kind::Family, true}},
        {"checkpoints", {Kind::NatList, true, 1}},
        {"range", {Kind::Range}},
        {"a", {Kind::RatPos}},
        {"b", {Kind::RatPos}},
        {"cap", {Kind::Count, false, 1}},
        {"min_k", {Kind::Count}},
        {"mod", {Kind::Nat, false, 1}}}},
      {"check-inclusions",
       {{"n", {Kind::Nat, false, 1}},
        {"p", {Kind::Prob}},
        {"seed", {Kind::Count}},
        {"trials", {Kind::Count, false, 1}},
        {"fa", {Kind::RatPos}},
        {"fb", {Kind::RatPos}},
        {"ga", {Kind::RatPos}},
        {"gb", {Kind::RatPos}},
        {"k", {Kind::Count, false, 1}},
        {"cap", {Kind::Count, false, 1}}}},
      {"check-cardinality",
       {{"n", {Kind::Nat, false, 1}},
        {"p", {Kind::Prob}},
        {"seed", {Kind::Count}},
        {"trials", {Kind::Count, false, 1}},
        {"m", {Kind::CountList}}}},
  };
  return table;
}

const Schema& exec_schema() {
  static const Schema table = {
      {"threads", {Kind::Count, false, 1}},
      {"output", {Kind::Text}},
      {"format", {Kind::Text}},
      {"cache_dir", {Kind::Text}},
  };
  return table;
}

void check_value(const std::string& key, const KeySpec& spec, const std::string& value) {
  switch (spec.kind) {
    case Kind::Count: {
      const std::uint64_t v = parse_count(key, value);
      if (v < spec.min)
        fail_key(key, "must be >= " + std::to_string(spec.min));
      break;
    }
    case Kind::CountList:
      for (std::uint64_t v : parse_count_list(key, value))
        if (v < spec.min) fail_key(key, "entries must be >= " + std::to_string(spec.min));
      break;
    case Kind::Nat:
      if (parse_nat(key, value) < static_cast<unsigned long>(spec.min))
        fail_key(key, "must be >= " + std::to_string(spec.min));
      break;
    case Kind::NatList:
      for (const Natural& v : parse_nat_list(key, value))
        if (v < static_cast<unsigned long>(spec.min))
          fail_key(key, "entries must be >= " + std::to_string(spec.min));
      break;
    case Kind::Rat:
      parse_rat(key, value);
      break;
    case Kind::RatNonNegList:
      for (const Rational& q : parse_rat_list(key, value))
        if (sgn(q) < 0) fail_key(key, "entries must be >= 0");
      break;
    case Kind::RatPos:
      if (sgn(parse_rat(key, value)) <= 0) fail_key(key, "must be > 0");
      break;
    case Kind::Prob: {
      const Rational p = parse_rat(key, value);
      if (sgn(p) <= 0 || p > 1) fail_key(key, "must be a probability in (0, 1]");
      if (!fits_u64(Natural(p.get_den())))
        fail_key(key, "denominator too large");
      break;
    }
    case Kind::Range:
      parse_range(key, value);
      break;
    case Kind::Variant:
      parse_variant(key, value);
      break;
    case Kind::Cmp:
      parse_cmp(key, value);
      break;
    case Kind::Family:
      if (value != "mf" && value != "mf-complement" && value != "multiples" &&
          value != "all")
        fail_key(key, "'" + value + "' is not a set family (mf|mf-complement|multiples|all)");
      break;
    case Kind::Text:
      if (value.empty()) fail_key(key, "must not be empty");
      if (key == "format" && value != "csv" && value != "json")
        fail_key(key, "'" + value + "' is not an output format (csv|json)");
      break;
  }
}

void validate_config(const ExperimentConfig& config) {
  const auto& table = schemas();
  auto sub = table.find(config.subcommand);
  if (sub == table.end()) {
    std::string names;
    for (const auto& [name, schema] : table) {
      if (!names.empty()) names += ", ";
      names += name;
    }
    throw ConfigError("unknown subcommand '" + config.subcommand +
                      "'; expected one of: " + names);
  }
  const Schema& schema = sub->second;
  const Schema& exec = exec_schema();
  for (const auto& [key, value] : config.params) {
    auto it = schema.find(key);
    if (it == schema.end()) {
      it = exec.find(key);
      if (it == exec.end())
        throw ConfigError("unknown key '" + key + "' for subcommand '" +
                          config.subcommand + "'");
    }
    check_value(key, it->second, value);
  }
  for (const auto& [key, spec] : schema) {
    if (spec.required && config.params.find(key) == config.params.end())
      throw ConfigError("subcommand '" + config.subcommand + "' requires " +
                        display_key(key));
  }

  // Cross-field constraints.
  const auto has = [&](const char* k) { return config.params.count(k) > 0; };
  if (config.subcommand == "census") {
    for (std::uint64_t m : parse_count_list("m", config.params.at("m")))
      if (m > kCensusMaxM)
        throw ConfigError("--m: " + std::to_string(m) +
                          " exceeds the enumeration guard " + std::to_string(kCensusMaxM));
  } else if (config.subcommand == "bijection") {
    const std::uint64_t k = parse_count("k", config.params.at("k"));
    if (k > kResidueTableMaxK)
      throw ConfigError("--k: " + std::to_string(k) + " exceeds the table guard " +
                        std::to_string(kResidueTableMaxK));
  } else if (config.subcommand == "himage") {
    if (has("elements") == has("range"))
      throw ConfigError("himage needs exactly one of --elements or --range");
  } else if (config.subcommand == "profile") {
    const std::string family = config.params.at("family");
    if ((family == "mf" || family == "mf-complement") && !has("range"))
      throw ConfigError("profile family '" + family + "' requires --range");
    if (family == "multiples" && !has("mod"))
      throw ConfigError("profile family 'multiples' requires --mod");
  }
}

// ---------------------------------------------------------------------------
// Typed access to already-validated params.

class P {
 public:
  explicit P(const ExperimentConfig& cfg) : cfg_(cfg) {}

  bool has(const std::string& key) const { return cfg_.params.count(key) > 0; }
  std::string text(const std::string& key, const std::string& def) const {
    auto it = cfg_.params.find(key);
    return it == cfg_.params.end() ? def : it->second;
  }
  std::uint64_t count(const std::string& key, std::uint64_t def) const {
    auto it = cfg_.params.find(key);
    return it == cfg_.params.end() ? def : parse_count(key, it->second);
  }
  Natural nat(const std::string& key, const std::string& def) const {
    return parse_nat(key, text(key, def));
  }
  Rational rat(const std::string& key, const std::string& def) const {
    return parse_rat(key, text(key, def));
  }
  std::pair<Natural, Natural> range(const std::string& key) const {
    return parse_range(key, cfg_.params.at(key));
  }
  std::vector<std::uint64_t> counts(const std::string& key, const std::string& def) const {
    return parse_count_list(key, text(key, def));
  }
  std::vector<Natural> nats(const std::string& key) const {
    return parse_nat_list(key, cfg_.params.at(key));
  }
  std::vector<Rational> rats(const std::string& key) const {
    return parse_rat_list(key, cfg_.params.at(key));
  }

 private:
  const ExperimentConfig& cfg_;
};

// ---------------------------------------------------------------------------
// Rendering

struct Table {
  std::vector<std::pair<std::string, std::string>> extras;  // header lines
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, ordered_json>> json_extras;  // json only

  void extra(const std::string& key, const std::string& value) {
    extras.emplace_back(key, value);
  }
  void row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

std::map<std::string, std::string> canonical_params(const ExperimentConfig& config) {
  std::map<std::string, std::string> out = config.params;
  out.erase("threads");
  out.erase("output");
  out.erase("cache_dir");
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string render_csv(const ExperimentConfig& config, const Table& t) {
  std::ostringstream out;
  out << "# " << kToolName << " " << kVersion << "\n";
  std::istringstream canon(canonical_config(config));
  for (std::string line; std::getline(canon, line);) out << "# " << line << "\n";
  for (const auto& [key, value] : t.extras) out << "# " << key << "=" << value << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : "") << csv_quote(t.columns[i]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_quote(row[i]);
    out << "\n";
  }
  return out.str();
}

std::string render_json(const ExperimentConfig& config, const Table& t) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["subcommand"] = config.subcommand;
  ordered_json cfg = ordered_json::object();
  for (const auto& [key, value] : canonical_params(config)) cfg[key] = value;
  j["config"] = cfg;
  for (const auto& [key, value] : t.extras) j[key] = value;
  for (const auto& [key, value] : t.json_extras) j[key] = value;
  j["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) rows.push_back(row);
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string bool_str(bool b) { return b ? "true" : "false"; }
std::string variant_str(ParityVariant v) {
  return v == ParityVariant::Inclusive ? "inclusive" : "exclusive";
}
std::string cmp_str(Comparator c) {
  return c == Comparator::Strict ? "strict" : "weak";
}
std::string u64_str(std::uint64_t v) { return std::to_string(v); }

ordered_json natural_array(const std::vector<Natural>& values) {
  ordered_json arr = ordered_json::array();
  for (const auto& v : values) arr.push_back(to_string(v));
  return arr;
}

// ---------------------------------------------------------------------------
// Handlers

Table handle_traj(const P& p, unsigned /*threads*/) {
  const Natural n = p.nat("n", "1");
  const std::uint64_t cap = p.count("cap", 100000);
  const TrajectoryRecord rec = trajectory(n, cap);

  Natural peak = rec.start;
  for (const auto& v : rec.iterates)
    if (v > peak) peak = v;

  Table t;
  t.extra("start", to_string(rec.start));
  t.extra("steps", u64_str(rec.steps));
  t.extra("terminated_by",
          rec.terminated_by == Termination::ReachedOne ? "reached-one" : "cap-hit");
  t.extra("peak", to_string(peak));
  t.columns = {"k", "value"};
  for (std::size_t k = 0; k < rec.iterates.size(); ++k)
    t.row({u64_str(k), to_string(rec.iterates[k])});
  return t;
}

Table handle_census(const P& p, unsigned threads) {
  const auto ms = p.counts("m", "");
  const auto ds = p.rats("d");
  const ParityVariant variant = parse_variant("variant", p.text("variant", "exclusive"));
  const auto cmps = parse_cmp("cmp", p.text("cmp", "strict"));
  const Natural base = p.nat("base", "0");

  Table t;
  t.columns = {"m", "d_num", "d_den", "variant", "cmp",
               "window_base", "count", "total", "ratio_decimal"};
  for (std::uint64_t m : ms) {
    const unsigned mm = static_cast<unsigned>(m);
    const unsigned nbits = variant == ParityVariant::Inclusive ? mm + 1 : mm;
    const auto hist =
        parity_sum_histogram(nbits, base, std::uint64_t{1} << mm, threads);
    const Natural total = pow2(mm);
    for (const Rational& d : ds) {
      for (Comparator cmp : cmps) {
        Natural count = 0;
        for (std::uint64_t s = 0; s < hist.size(); ++s)
          if (hist[s] != 0 && sum_passes(s, mm, d, cmp)) count += hist[s];
        Rational ratio(count, total);
        ratio.canonicalize();
        t.row({u64_str(m), to_string(numerator(d)), to_string(denominator(d)),
               variant_str(variant), cmp_str(cmp), to_string(base), to_string(count),
               to_string(total), decimal_string(ratio)});
      }
    }
  }
  return t;
}

Table handle_oracle(const P& p) {
  const auto ms = p.counts("m", "");
  const auto ds = p.rats("d");
  const ParityVariant variant = parse_variant("variant", p.text("variant", "exclusive"));
  const auto cmps = parse_cmp("cmp", p.text("cmp", "strict"));

  Table t;
  t.columns = {"m", "d_num", "d_den", "variant", "cmp", "count", "total",
               "ratio_decimal"};
  for (std::uint64_t m : ms) {
    const unsigned mm = static_cast<unsigned>(m);
    const unsigned nbits = variant == ParityVariant::Inclusive ? mm + 1 : mm;
    const Natural total = pow2(nbits);  // one full period of the parity bits
    for (const Rational& d : ds) {
      for (Comparator cmp : cmps) {
        const Natural count = binomial_census_oracle(mm, d, variant, cmp);
        Rational ratio(count, total);
        ratio.canonicalize();
        t.row({u64_str(m), to_string(numerator(d)), to_string(denominator(d)),
               variant_str(variant), cmp_str(cmp), to_string(count), to_string(total),
               decimal_string(ratio)});
      }
    }
  }
  return t;
}

Table handle_bijection(const P& p) {
  const unsigned k = static_cast<unsigned>(p.count("k", 1));
  const auto table = residue_parity_table(k);
  const std::uint64_t size = std::uint64_t{1} << k;

  std::vector<std::uint64_t> codes;
  codes.reserve(table.size());
  for (const auto& pv : table) codes.push_back(pv.packed());
  std::sort(codes.begin(), codes.end());
  const std::uint64_t distinct = static_cast<std::uint64_t>(
      std::unique(codes.begin(), codes.end()) - codes.begin());

  // Period exactly 2^k: shifting by 2^k fixes every vector, halving does not.
  bool period_exact = true;
  for (std::uint64_t r = 0; r < size && period_exact; ++r)
    if (!(parity_vector(Natural(static_cast<unsigned long>(r + size)), k) == table[r]))
      period_exact = false;
  bool period_minimal = false;
  for (std::uint64_t r = 0; r < size / 2 && !period_minimal; ++r)
    if (!(table[r] == table[r + size / 2])) period_minimal = true;
  if (size == 1) period_minimal = true;  // k = 0 never reaches here (k >= 1)

  Table t;
  t.columns = {"k", "residues", "distinct_vectors", "bijective", "period_exact",
               "period_minimal"};
  t.row({u64_str(k), u64_str(size), u64_str(distinct), bool_str(distinct == size),
         bool_str(period_exact), bool_str(period_minimal)});
  return t;
}

Table handle_lemma2(const P& p, unsigned threads, std::uint64_t& seed_out) {
  const unsigned m = static_cast<unsigned>(p.count("m", 3));
  const Rational d = p.rat("d", "1/2");
  const ParityVariant variant = parse_variant("variant", p.text("variant", "exclusive"));
  const auto [lo, hi] = p.range("range");
  AuditSample sample;
  sample.lo = lo;
  sample.hi = hi;
  sample.sample_count = p.count("sample", 0);
  sample.seed = p.count("seed", 0);
  seed_out = sample.seed;

  if (sample.sample_count == 0) {
    const Natural len = hi - lo + 1;
    if (!fits_u64(len) || to_u64(len) > kMaxAuditPoints)
      throw ConfigError("exhaustive audit window capped at " +
                        std::to_string(kMaxAuditPoints) + " points; pass --sample");
  }

  const DropAuditReport rep = drop_guarantee_audit(m, d, sample, variant, threads);
  const std::uint64_t violations =
      rep.floor_violations + rep.chain_violations + rep.final_violations;

  Table t;
  t.extra("mode", sample.sample_count == 0 ? "exhaustive" : "sampled");
  if (!rep.witnesses.empty()) {
    std::string joined;
    for (const auto& w : rep.witnesses) {
      if (!joined.empty()) joined += ",";
      joined += to_string(w);
    }
    t.extra("violation_witnesses", joined);
  }
  t.json_extras.emplace_back("violation_witness_values", natural_array(rep.witnesses));
  t.columns = {"m", "d_num", "d_den", "variant", "lo", "hi", "sample_size", "seed",
               "examined", "audited", "not_in_class", "rejected", "floor_violations",
               "chain_violations", "final_violations", "violations"};
  t.row({u64_str(m), to_string(numerator(d)), to_string(denominator(d)),
         variant_str(variant), to_string(lo), to_string(hi),
         u64_str(sample.sample_count), u64_str(sample.seed), u64_str(rep.examined),
         u64_str(rep.audited), u64_str(rep.not_in_class), u64_str(rep.rejected),
         u64_str(rep.floor_violations), u64_str(rep.chain_violations),
         u64_str(rep.final_violations), u64_str(violations)});
  return t;
}

Table handle_mscan(const P& p, unsigned threads) {
  const Rational a = p.rat("a", "1");
  const Rational b = p.rat("b", "1");
  const BoundFunction f(a, b);
  const auto [lo, hi] = p.range("range");
  const std::uint64_t cap = p.count("cap", 100000);
  const std::uint64_t min_k = p.count("min_k", 0);

  const DropScanReport rep = drop_scan(f, lo, hi, cap, min_k, threads);

  Table t;
  t.extra("total", u64_str(rep.total));
  t.extra("excluded", u64_str(rep.excluded));
  t.extra("min_k", u64_str(rep.min_k));
  t.json_extras.emplace_back("unresolved", natural_array(rep.unresolved));
  t.columns = {"a_num", "a_den", "b_num", "b_den", "lo", "hi", "cap",
               "resolved", "unresolved_count", "fraction"};
  t.row({to_string(numerator(a)), to_string(denominator(a)), to_string(numerator(b)),
         to_string(denominator(b)), to_string(rep.lo), to_string(rep.hi),
         u64_str(rep.cap), u64_str(rep.dropped),
         u64_str(static_cast<std::uint64_t>(rep.unresolved.size())),
         render_rational(rep.fraction)});
  return t;
}

FiniteSet set_from_params(const P& p) {
  if (p.has("elements")) return FiniteSet::from(p.nats("elements"));
  const auto [lo, hi] = p.range("range");
  const Natural len = hi - lo + 1;
  if (!fits_u64(len) || to_u64(len) > kMaxSetItems)
    throw ConfigError("--range: too large to materialize (limit " +
                      std::to_string(kMaxSetItems) + ")");
  return FiniteSet::range_closed(lo, hi);
}

Table handle_himage(const P& p, unsigned threads) {
  const FiniteSet A = set_from_params(p);
  const BoundFunction f(p.rat("a", "1"), p.rat("b", "1"));
  const std::uint64_t cap = p.count("cap", 100000);

  const HImageResult res = h_image(A, f, cap, threads);

  Table t;
  t.extra("source_size", u64_str(A.size()));
  t.extra("image_size", u64_str(res.image.size()));
  t.extra("saturated_count", u64_str(res.saturated_sources.size()));
  t.columns = {"kind", "value"};
  for (const auto& v : res.image.elements()) t.row({"image", to_string(v)});
  for (const auto& n : res.saturated_sources) t.row({"saturated", to_string(n)});
  return t;
}

// Members (or non-members) of the drop set {y : some T^k(y) < f(y), k >= min_k}
// in [lo, hi]; complement counts excluded and cap-unresolved values.
FiniteSet drop_member_set(const BoundFunction& f, const Natural& lo, const Natural& hi,
                          std::uint64_t cap, std::uint64_t min_k, unsigned threads,
                          bool complement) {
  const std::uint64_t lo64 = to_u64(lo);
  const std::uint64_t length = to_u64(hi) - lo64 + 1;
  auto parts = chunked_map<std::vector<std::uint64_t>>(
      0, length, 1 << 13, threads, [&](std::uint64_t clo, std::uint64_t chi) {
        std::vector<std::uint64_t> members;
        for (std::uint64_t i = clo; i < chi; ++i) {
          const std::uint64_t y = lo64 + i;
          const bool dropped =
              first_drop(Natural(static_cast<unsigned long>(y)), f, cap, min_k)
                  .has_value();
          if (dropped != complement)
            members.push_back(y);
        }
        return members;
      });
  std::vector<Natural> values;
  for (const auto& part : parts)
    for (std::uint64_t y : part)
      values.push_back(Natural(static_cast<unsigned long>(y)));
  return FiniteSet::from(std::move(values));
}

Table handle_profile(const P& p, unsigned threads) {
  const std::string family = p.text("family", "all");
  std::vector<Natural> cps = p.nats("checkpoints");
  if (cps.empty()) throw ConfigError("--checkpoints: empty list");
  const Natural maxcp = *std::max_element(cps.begin(), cps.end());

  FiniteSet A;
  if (family == "all") {
    if (!fits_u64(maxcp) || to_u64(maxcp) > kMaxSetItems)
      throw ConfigError("--checkpoints: too large to materialize the family");
    A = FiniteSet::range_closed(1, maxcp);
  } else if (family == "multiples") {
    const Natural mod = p.nat("mod", "1");
    std::vector<Natural> values;
    const Natural cnt = maxcp / mod;
    if (!fits_u64(cnt) || to_u64(cnt) > kMaxSetItems)
      throw ConfigError("--checkpoints: too large to materialize the family");
    for (Natural v = mod; v <= maxcp; v += mod) values.push_back(v);
    A = FiniteSet::from(std::move(values));
  } else {  // mf | mf-complement
    const BoundFunction f(p.rat("a", "1"), p.rat("b", "1"));
    const auto [lo, hi] = p.range("range");
    if (lo < 1) throw ConfigError("--range: membership scans need lo >= 1");
    if (hi > 1000000000) throw ConfigError("--range: membership scans capped at 10^9");
    const Natural len = hi - lo + 1;
    if (!fits_u64(len) || to_u64(len) > kMaxSetItems)
      throw ConfigError("--range: too large for a membership scan (limit " +
                        std::to_string(kMaxSetItems) + ")");
    A = drop_member_set(f, lo, hi, p.count("cap", 100000), p.count("min_k", 0),
                        threads, family == "mf-complement");
  }

  const DensityProfile profile = density_profile(A, std::move(cps));

  Table t;
  t.extra("label", "finite-scale estimate");
  t.extra("set_size", u64_str(A.size()));
  t.extra("burn_in_index", u64_str(profile.burn_in_index));
  t.extra("tail_sup", render_rational(profile.tail_sup));
  t.extra("tail_inf", render_rational(profile.tail_inf));
  t.extra("tail_sup_decimal", decimal_string(profile.tail_sup));
  t.extra("tail_inf_decimal", decimal_string(profile.tail_inf));
  if (family == "mf-complement")
    t.extra("note", "complement counts cap-unresolved values as members");
  t.columns = {"checkpoint", "count", "ratio", "ratio_decimal"};
  for (std::size_t i = 0; i < profile.checkpoints.size(); ++i) {
    const Natural& cp = profile.checkpoints[i];
    t.row({to_string(cp), u64_str(A.count_in_closed(1, cp)),
           render_rational(profile.ratios[i]), decimal_string(profile.ratios[i])});
  }
  return t;
}

FiniteSet bernoulli_subset(const Natural& n, const Rational& p, std::uint64_t seed) {
  SeededRng rng(seed);
  const std::uint64_t n64 = to_u64(n);
  std::vector<Natural> values;
  for (std::uint64_t y = 1; y <= n64; ++y)
    if (rng.bernoulli(p)) values.push_back(Natural(static_cast<unsigned long>(y)));
  return FiniteSet::from(std::move(values));
}

Table handle_check_inclusions(const P& p, unsigned threads, std::uint64_t& seed_out) {
  const Natural n = p.nat("n", "10000");
  if (!fits_u64(n) || to_u64(n) > kMaxSetItems)
    throw ConfigError("--n: universe capped at " + std::to_string(kMaxSetItems));
  const Rational prob = p.rat("p", "1/10");
  const std::uint64_t seed = p.count("seed", 0);
  const std::uint64_t trials = p.count("trials", 1);
  if (trials > 10000) throw ConfigError("--trials: capped at 10000");
  const BoundFunction f(p.rat("fa", "1/2"), p.rat("fb", "1"));
  const BoundFunction g(p.rat("ga", "1/4"), p.rat("gb", "1"));
  const unsigned k = static_cast<unsigned>(p.count("k", 2));
  if (k > 32) throw ConfigError("--k: capped at 32");
  const std::uint64_t cap = p.count("cap", 100000);
  seed_out = seed;

  Table t;
  t.extra("f", f.str());
  t.extra("g", g.str());
  t.columns = {"trial", "trial_seed", "set_size", "comparison", "composition",
               "power", "power_k", "saturated_count", "verdict_valid"};
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = seed + trial;
    const FiniteSet A = bernoulli_subset(n, prob, trial_seed);
    const InclusionReport rep = image_inclusion_check(A, f, g, k, cap, threads);
    t.row({u64_str(trial), u64_str(trial_seed), u64_str(A.size()),
           bool_str(rep.comparison_holds), bool_str(rep.composition_holds),
           bool_str(rep.power_holds), u64_str(rep.power_k),
           u64_str(rep.saturated.size()), bool_str(rep.verdict_valid)});
  }
  return t;
}

Table handle_check_cardinality(const P& p, std::uint64_t& seed_out) {
  const Natural n = p.nat("n", "65536");
  if (!fits_u64(n) || to_u64(n) > kMaxSetItems)
    throw ConfigError("--n: universe capped at " + std::to_string(kMaxSetItems));
  const Rational prob = p.rat("p", "1/10");
  const std::uint64_t seed = p.count("seed", 0);
  const std::uint64_t trials = p.count("trials", 1);
  if (trials > 10000) throw ConfigError("--trials: capped at 10000");
  const auto ms = p.counts("m", "8");
  for (std::uint64_t m : ms)
    if (m > 1000) throw ConfigError("--m: capped at 1000");
  seed_out = seed;

  Table t;
  t.columns = {"trial", "trial_seed", "m", "source_size", "image_size", "holds"};
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = seed + trial;
    const FiniteSet B = bernoulli_subset(n, prob, trial_seed);
    for (std::uint64_t m : ms) {
      const CardinalityCheck chk = image_cardinality_check(B, static_cast<unsigned>(m));
      t.row({u64_str(trial), u64_str(trial_seed), u64_str(m),
             u64_str(chk.source_size), u64_str(chk.image_size), bool_str(chk.holds)});
    }
  }
  return t;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  bool have_sub = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (key == "subcommand") {
      if (have_sub)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": duplicate subcommand");
      config.subcommand = value;
      have_sub = true;
    } else {
      if (!config.params.emplace(key, value).second)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": duplicate key '" + key + "'");
    }
  }
  if (!have_sub) throw ConfigError("config text is missing subcommand=...");
  return config;
}

std::string render_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "subcommand=" << config.subcommand << "\n";
  for (const auto& [key, value] : config.params) out << key << "=" << value << "\n";
  return out.str();
}

std::string canonical_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "subcommand=" << config.subcommand << "\n";
  for (const auto& [key, value] : canonical_params(config))
    out << key << "=" << value << "\n";
  return out.str();
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  if (args.empty())
    throw ConfigError("missing subcommand; try 'collatz --help'");

  std::string positional;
  std::size_t i = 0;
  if (args[0].rfind("--", 0) != 0) {
    positional = args[0];
    i = 1;
  }

  ExperimentConfig file_config;
  bool have_file = false;
  std::string flag_sub;
  std::vector<std::pair<std::string, std::string>> flags;
  for (; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg.rfind("--", 0) != 0)
      throw ConfigError("unexpected positional argument '" + arg + "'");
    std::string key = arg.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    if (key.empty()) throw ConfigError("empty flag name");
    if (i + 1 >= args.size()) throw ConfigError("flag '" + arg + "' needs a value");
    const std::string value = args[++i];
    if (key == "config") {
      if (have_file) throw ConfigError("--config given twice");
      std::ifstream in(value);
      if (!in) throw ConfigError("cannot read config file '" + value + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      file_config = parse_config_text(buf.str());
      have_file = true;
    } else if (key == "subcommand") {
      flag_sub = value;
    } else {
      flags.emplace_back(key, value);
    }
  }

  ExperimentConfig config = have_file ? file_config : ExperimentConfig{};
  if (!flag_sub.empty()) {
    if (have_file && !config.subcommand.empty() && config.subcommand != flag_sub)
      throw ConfigError("--subcommand '" + flag_sub +
                        "' conflicts with config file subcommand '" +
                        config.subcommand + "'");
    config.subcommand = flag_sub;
  }
  if (!positional.empty()) {
    if (!config.subcommand.empty() && config.subcommand != positional)
      throw ConfigError("subcommand '" + positional +
                        "' conflicts with configured subcommand '" +
                        config.subcommand + "'");
    config.subcommand = positional;
  }
  if (config.subcommand.empty())
    throw ConfigError("missing subcommand; try 'collatz --help'");
  for (const auto& [key, value] : flags) config.params[key] = value;

  validate_config(config);
  return config;
}

const std::vector<std::string>& known_subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, schema] : schemas()) out.push_back(name);
    return out;
  }();
  return names;
}

RunRecord run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_config(config);
  const P p(config);
  const unsigned threads = static_cast<unsigned>(p.count("threads", 1));
  const std::string format = p.text("format", "csv");

  std::uint64_t seed = 0;
  Table table;
  try {
    if (config.subcommand == "traj") table = handle_traj(p, threads);
    else if (config.subcommand == "census") table = handle_census(p, threads);
    else if (config.subcommand == "oracle") table = handle_oracle(p);
    else if (config.subcommand == "bijection") table = handle_bijection(p);
    else if (config.subcommand == "lemma2") table = handle_lemma2(p, threads, seed);
    else if (config.subcommand == "mscan") table = handle_mscan(p, threads);
    else if (config.subcommand == "himage") table = handle_himage(p, threads);
    else if (config.subcommand == "profile") table = handle_profile(p, threads);
    else if (config.subcommand == "check-inclusions")
      table = handle_check_inclusions(p, threads, seed);
    else if (config.subcommand == "check-cardinality")
      table = handle_check_cardinality(p, seed);
    else
      throw ConfigError("unknown subcommand '" + config.subcommand + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }

  if (config.params.find("seed") == config.params.end())
    table.extra("seed", u64_str(seed));  // config echo already carries it otherwise

  RunRecord record;
  record.config = config;
  record.version = kVersion;
  record.seed = seed;
  record.payload =
      format == "json" ? render_json(config, table) : render_csv(config, table);
  record.cached = false;
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return record;
}

std::string ResultCache::key_path(const ExperimentConfig& config) const {
  const P p(config);
  const std::string canon =
      canonical_config(config) + "format=" + p.text("format", "csv") + "\n";
  return dir_ + "/" + hex16(fnv1a64(canon)) + ".json";
}

std::optional<RunRecord> ResultCache::lookup(const ExperimentConfig& config) const {
  const std::string path = key_path(config);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    ordered_json j;
    in >> j;
    if (j.at("version").get<std::string>() != kVersion) return std::nullopt;
    if (j.at("canonical").get<std::string>() != canonical_config(config))
      return std::nullopt;
    const P p(config);
    if (j.at("format").get<std::string>() != p.text("format", "csv"))
      return std::nullopt;
    RunRecord record;
    record.config = config;
    record.version = kVersion;
    record.seed = j.at("seed").get<std::uint64_t>();
    record.payload = j.at("payload").get<std::string>();
    record.cached = true;
    return record;
  } catch (const std::exception& e) {
    std::cerr << "cache: ignoring unreadable entry " << path << " (" << e.what()
              << ")\n";
    return std::nullopt;
  }
}

void ResultCache::store(const RunRecord& record) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  const P p(record.config);
  ordered_json j;
  j["version"] = record.version;
  j["canonical"] = canonical_config(record.config);
  j["format"] = p.text("format", "csv");
  j["seed"] = record.seed;
  j["payload"] = record.payload;

  const std::string path = key_path(record.config);
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "cache: cannot write " << tmp << "\n";
      return;
    }
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::cerr << "cache: cannot publish " << path << "\n";
    std::remove(tmp.c_str());
  }
}

RunRecord run_with_cache(const ExperimentConfig& config, const std::string& cache_dir) {
  if (cache_dir.empty()) return run(config);
  const ResultCache cache(cache_dir);
  if (auto hit = cache.lookup(config)) return *hit;
  RunRecord record = run(config);
  cache.store(record);
  return record;
}

}  // namespace collatz
