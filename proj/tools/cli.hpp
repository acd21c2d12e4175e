#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace arakelab::cli {

enum class Command { Mahler, Szego, Volume, H1, Stirling, Metrics, Rr };
enum class Format { Csv, Json };

std::string to_string(Command c);

struct RunConfig {
  Command command = Command::Mahler;
  std::string poly;          // polynomial text, or a path to a JSON polynomial
  std::optional<int> N;      // variables are x0..xN; inferred from poly when absent
  int d = 1;                 // stirling only
  long kmin = 1;
  long kmax = 10;
  long kstep = 1;
  std::optional<long> k;     // metrics only; defaults to kmax
  std::vector<int> p_list = {1, 2, 3, 4};
  long precision_bits = 128;
  std::uint64_t seed = 0;
  std::size_t cap = 10'000'000;
  unsigned threads = 0;      // 0: hardware concurrency
  std::string output;        // empty: report to stdout
  Format format = Format::Csv;
  std::string mode = "auto"; // szego: auto | exact | float
  long grid = 0;             // mahler/target quadrature nodes per outer axis; 0 = default
  bool timings = false;      // fill runtime_ms (otherwise NA)
};

// Bad flags or values; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseResult {
  std::optional<RunConfig> config;  // empty when help/version was printed
  int exit_code = 0;
};

// Precedence: flags > config file (--config JSON) > defaults. For threads,
// the ARAKELAB_THREADS entry of `env` is used when --threads is absent.
ParseResult parse_args(int argc, const char* const* argv, const std::map<std::string, std::string>& env,
                       std::ostream& out);

// Throws UsageError when an invariant of RunConfig is violated.
void validate(const RunConfig& config);

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitCap = 4,
  kExitPrecision = 5,
  kExitDomain = 6,
};

// Runs the command, writes report files (or the report to `out` when no
// output path is set) and returns the exit code. Failures print a JSON error
// object to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run with every failure mapped to its exit code; the body of
// the arakelab executable.
int main_entry(int argc, const char* const* argv, const std::map<std::string, std::string>& env,
               std::ostream& out, std::ostream& err);

// Output paths for the volume command: <stem>_deg, _h0, _h1 with the original
// extension.
std::vector<std::string> volume_paths(const std::string& output);

}  // namespace arakelab::cli
