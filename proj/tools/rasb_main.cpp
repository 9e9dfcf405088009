// Command-line front end: `rasb run <config>` executes one task,
// `rasb tables <config>` relaxes a list of cells into one table.
// Exit codes: 0 success, 2 usage or configuration error, 3 propagation
// failure, 1 anything else.

#include <exception>
#include <iostream>
#include <string>

#include "rasb/common.hpp"
#include "rasb/config.hpp"
#include "rasb/runner.hpp"

namespace {

int usage(std::ostream& err) {
  err << "usage: rasb run <config.json>\n"
         "       rasb tables <config.json>\n";
  return rasb::runner::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) return usage(std::cerr);
  const std::string mode = argv[1];
  const std::string path = argv[2];
  if (mode != "run" && mode != "tables") return usage(std::cerr);

  try {
    const std::string text = rasb::config::read_text_file(path);
    if (mode == "run") {
      const rasb::config::RunConfig cfg = rasb::config::parse_run_config(text);
      return rasb::runner::execute_run(cfg, std::cout, std::cerr);
    }
    const rasb::config::TableConfig cfg =
        rasb::config::parse_table_config(text);
    return rasb::runner::execute_tables(cfg, std::cout, std::cerr);
  } catch (const rasb::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return rasb::runner::kExitConfig;
  } catch (const rasb::PropagationError& e) {
    std::cerr << "propagation failed: " << e.what()
              << " (last good time t = " << e.last_good_time() << ")\n";
    return rasb::runner::kExitPropagation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
