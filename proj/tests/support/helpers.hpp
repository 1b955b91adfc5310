#pragma once

// Shared plumbing for unit and acceptance tests: locating the source tree
// (fixtures, schema tables), scratch directories, and running the CLI.

#include <string>
#include <vector>

#include "mvd/ifc/schema.hpp"

namespace mvd::test {

// Root of the source tree; MVDLITE_PROJECT_DIR when set, else cwd.
std::string project_dir();
std::string fixture_path(const std::string& relative);

// Repository preloaded with data/schemas of the source tree.
ifc::SchemaRepository& schemas();

// Fresh scratch directory under the build tree / TMPDIR; removed lazily.
std::string scratch_dir(const std::string& hint);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout+stderr
};
// Runs the built CLI (MVDLITE_CLI_PATH) with the given arguments.
RunResult run_cli(const std::vector<std::string>& args);
bool cli_available();

}  // namespace mvd::test
