#pragma once

// Shared test helpers: fixture paths, temp dirs, and the CVSS oracle
// fixture loader.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace testsupport {

inline std::filesystem::path fixture_dir() {
    return std::filesystem::path(CVSSKIT_FIXTURE_DIR);
}

inline std::filesystem::path config_dir() {
    return std::filesystem::path(CVSSKIT_CONFIG_DIR);
}

/// Self-deleting unique temp directory.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("cvsskit-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Lines of "vector,score" from the pre-generated FIRST-calculator oracle.
inline std::vector<std::pair<std::string, int>> load_cvss_oracle() {
    std::vector<std::pair<std::string, int>> rows;
    std::ifstream in(fixture_dir() / "cvss31_oracle.csv");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const std::size_t comma = line.rfind(',');
        const std::string vector = line.substr(0, comma);
        const double score = std::stod(line.substr(comma + 1));
        rows.emplace_back(vector, static_cast<int>(score * 10.0 + 0.5));
    }
    return rows;
}

} // namespace testsupport
