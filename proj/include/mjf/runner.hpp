#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mjf/config.hpp"
#include "mjf/report.hpp"

namespace mjf {

inline const std::vector<std::string> kCommands{"detect", "factorize", "verify", "sweep", "certify", "oracle", "grassmann"};

/// Command-line overrides of the configuration document.
struct RunOptions {
  std::optional<unsigned> lambda;
  std::optional<std::size_t> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> oracle_box;
  std::optional<std::uint64_t> plane_cap;
  std::size_t threads = 1;
  std::size_t draws = 20;  // random handicaps / tuple choices / plane weights per check
  bool timing = false;
};

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBudget = 2;

/// Runs one command. Library errors become an "error" entry and exit code 1;
/// they are never thrown out of here.
RunReport run_command(const std::string& command, const RunConfig& cfg, const RunOptions& options = {});

/// parse_config + run_command.
RunReport run_text(const std::string& command, std::string_view config_text, const RunOptions& options = {});

/// The mjf executable: mjf COMMAND --config PATH [flags]. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mjf
