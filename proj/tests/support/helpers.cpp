#include "support/helpers.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mvd::test {

namespace fs = std::filesystem;

std::string project_dir() {
    if (const char* env = std::getenv("MVDLITE_PROJECT_DIR")) return env;
    return fs::current_path().string();
}

std::string fixture_path(const std::string& relative) {
    return (fs::path(project_dir()) / relative).string();
}

ifc::SchemaRepository& schemas() {
    static ifc::SchemaRepository repo{{fixture_path("data/schemas")}};
    return repo;
}

std::string scratch_dir(const std::string& hint) {
    static std::atomic<int> counter{0};
    fs::path base = fs::temp_directory_path() / "mvdlite-tests";
    fs::path dir = base / (hint + "-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter.fetch_add(1)));
    fs::create_directories(dir);
    return dir.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

bool cli_available() { return std::getenv("MVDLITE_CLI_PATH") != nullptr; }

RunResult run_cli(const std::vector<std::string>& args) {
    const char* cli = std::getenv("MVDLITE_CLI_PATH");
    if (!cli) throw std::runtime_error("MVDLITE_CLI_PATH not set");
    std::string cmd = "'";
    cmd += cli;
    cmd += "'";
    for (const std::string& a : args) {
        cmd += " '";
        for (char c : a) {
            if (c == '\'')
                cmd += "'\\''";
            else
                cmd.push_back(c);
        }
        cmd += "'";
    }
    cmd += " 2>&1";
    RunResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
    int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace mvd::test
