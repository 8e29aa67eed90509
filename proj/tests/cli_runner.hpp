#pragma once

// Runs the bandedge binary in a subprocess and captures stdout.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace cli {

struct Result {
    int status = -1;
    std::string out;
};

inline Result run(const std::string& args) {
    const std::string command = std::string("\"") + BANDEDGE_CLI_PATH + "\" " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return r;
    char buffer[4096];
    std::size_t n;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

/// Writes `text` to a fresh file under the temp directory and returns its path.
inline std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("bandedge_test_" + name);
    std::ofstream(path, std::ios::binary) << text;
    return path.string();
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace cli
