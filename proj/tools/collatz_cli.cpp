#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "collatz/harness.hpp"
#include "collatz/version.hpp"

namespace {

void print_usage(std::ostream& out) {
  out << "usage: collatz <subcommand> [--config FILE] [--key value]...\n"
         "\n"
         "subcommands:\n"
         "  traj               iterate the map from a start value\n"
         "  census             exact low-parity counts over a window\n"
         "  oracle             closed-form binomial cross-check of the census\n"
         "  bijection          residue <-> parity-vector table check\n"
         "  lemma2             audit the m-step drop guarantee\n"
         "  mscan              scan a range for drops below a bound a*y^b\n"
         "  himage             trajectory image of a finite set under a bound\n"
         "  profile            finite-scale density profile of a set family\n"
         "  check-inclusions   image inclusion laws on random finite sets\n"
         "  check-cardinality  m-step image cardinality bound on random sets\n"
         "\n"
         "common flags:\n"
         "  --config FILE      flat key=value experiment description\n"
         "  --output PATH      write the payload to PATH instead of stdout\n"
         "  --format csv|json  payload format (default csv)\n"
         "  --threads N        worker threads; payloads are identical for any N\n"
         "  --cache-dir DIR    reuse finished runs (or set COLLATZ_CACHE_DIR)\n"
         "\n"
         "Any subcommand key can be passed as --key value or as a key=value\n"
         "line in the --config file; flags override file entries.\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    print_usage(std::cerr);
    return 2;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    print_usage(std::cout);
    return 0;
  }
  if (args[0] == "--version") {
    std::cout << "collatz-density-lab " << collatz::kVersion << "\n";
    return 0;
  }

  try {
    const collatz::ExperimentConfig config = collatz::parse_config(args);

    std::string cache_dir;
    if (auto it = config.params.find("cache_dir"); it != config.params.end())
      cache_dir = it->second;
    else if (const char* env = std::getenv("COLLATZ_CACHE_DIR"))
      cache_dir = env;

    const collatz::RunRecord record = collatz::run_with_cache(config, cache_dir);

    std::string output;
    if (auto it = config.params.find("output"); it != config.params.end())
      output = it->second;
    if (output.empty()) {
      std::cout << record.payload;
    } else {
      std::ofstream out(output, std::ios::binary | std::ios::trunc);
      if (!out) {
        std::cerr << "error: cannot write output file '" << output << "'\n";
        return 1;
      }
      out << record.payload;
    }
    std::cerr << "wall_seconds=" << record.wall_seconds
              << (record.cached ? " cached=true" : " cached=false") << "\n";
    return 0;
  } catch (const collatz::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
