// triwave <command> --config <path> [--output <dir>] [--seed <u64>] [--threads <n>]

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "triwave.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw triwave::ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::optional<int> env_threads() {
  const char* value = std::getenv("TRIWAVE_THREADS");
  if (!value || !*value) return std::nullopt;
  try {
    std::size_t used = 0;
    const int n = std::stoi(value, &used);
    if (used == std::string(value).size() && n >= 1) return n;
  } catch (const std::exception&) {
  }
  throw triwave::ConfigError(std::string("TRIWAVE_THREADS must be a positive integer, got '") + value + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the three-wave NLS system on a periodic box"};
  std::string command;
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("command", command, "solve | sweep | gamma0 | compare-potential | scalar-ref")
      ->required()
      ->check(CLI::IsMember({"solve", "sweep", "gamma0", "compare-potential", "scalar-ref"}));
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--output", output, "output directory (overrides [output] directory)");
  app.add_option("--seed", seed, "random seed (overrides [solve] seed)");
  app.add_option("--threads", threads, "worker threads (default: TRIWAVE_THREADS, then [solve] threads)")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : triwave::kExitConfigError;
  }

  try {
    const auto base = config_path.has_parent_path() ? config_path.parent_path() : std::filesystem::path(".");
    auto rc = triwave::parse_config(read_file(config_path), triwave::parse_command(command), base);
    if (output) rc.output_dir = *output;
    if (seed) rc.solve.seed = *seed;
    if (threads) {
      rc.solve.threads = *threads;
    } else if (const auto n = env_threads()) {
      rc.solve.threads = *n;
    }
    return triwave::run(rc, std::cerr);
  } catch (const triwave::ConfigError& e) {
    std::cerr << "triwave: configuration error: " << e.what() << '\n';
    return triwave::kExitConfigError;
  } catch (const triwave::InvalidArgument& e) {
    std::cerr << "triwave: invalid argument: " << e.what() << '\n';
    return triwave::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "triwave: error: " << e.what() << '\n';
    return triwave::kExitConfigError;
  }
}
