#pragma once

// Command-line front end: flag model, parsing/rendering and dispatch.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbdg/types.hpp"

namespace sbdg::cli {

enum class ExitCode : int { success = 0, failure = 1, usage = 2 };

/// Every flag of every subcommand. Only the fields of `command` are used.
struct Options {
  std::string command;  // eigen | charpoly | cfl-max | stability-map | amplify | converge | simulate
  int p = 1;
  int cells = 2;
  double d = 0.0;
  std::string d_rational = "0";
  bool periodic = false;
  Integrator integrator = Integrator::explicit_rk;
  double d_min = -1.0;
  double d_max = 1.0;
  double cfl_max = 1.0;
  int grid = 201;
  int samples = 201;
  double cfl = 1.0;
  std::vector<int> meshes{20, 40, 80, 160, 320};
  bool raw_dt = false;
  std::string out;  // empty: standard output

  bool operator==(const Options&) const = default;
};

/// Parses arguments (without the program name). Throws UsageError.
Options parse(const std::vector<std::string>& args);

/// Arguments that parse back to `options`.
std::vector<std::string> render(const Options& options);

struct UsageError {
  std::string message;
  int exit_code = int(ExitCode::usage);  // 0 for --help
};

/// Runs one invocation; CSV goes to --out or `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Scientific notation with 13 significant digits.
std::string format_number(double value);

/// CSV text with a header row and LF line endings.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

}  // namespace sbdg::cli
