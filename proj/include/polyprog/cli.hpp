// Command-line front end: resolves a RunConfig (defaults < config file <
// flags), dispatches to the library, and emits CSV/JSON reports.
#pragma once

#include "polyprog/report.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace polyprog {

// Built-in parameter defaults of a command, applied beneath the values
// carried by the RunConfig.  Unknown commands yield an empty map.
std::map<std::string, std::string> command_defaults(const std::string& command);

// Runs one command from a resolved configuration.  Human-readable output
// (tables, progress lines) goes to `out`, diagnostics to `err`; when
// config.out_dir is set the report files <out_dir>/<command>.{csv,json,
// meta.json} are written.  Returns 0 on success, 1 on a failed check or
// exhausted budget, 2 on a usage error.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full argv-style entry point (argv[0] excluded).  Parses global and
// per-command flags, loads --config files, then calls run_command.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace polyprog
