#pragma once

// Command-line driver: input parsing, the command pipeline, a content-addressed
// result cache and the batch runner.

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace zgkh::cli {

inline constexpr const char* kCodeVersion = "zgkh-1";

struct JobSpec {
    enum class Input { None, Pd, Braid, Rational, JsonComplex };
    Input input = Input::None;
    std::string source;  // PD text, braid word, rational text or path to a complex JSON file
    // complex | decompose | invariants | zigzag | verify | certify-rational
    std::string command;
    std::vector<std::string> args;  // positional arguments of zigzag / verify / certify-rational
    std::string emit = "graph";     // zigzag: graph | complex | closure
    int basepoint = -1;             // original edge label, -1 for the lowest
    std::size_t cap = 2000000;
    bool json = false;
    std::string cache_dir;  // empty: no cache
};

struct Outcome {
    int exit_code = 0;  // 0 ok, 1 parse or usage error, 2 resource cap, 3 invariant violation
    nlohmann::json report;
    std::string text;
    bool cache_hit = false;
};

Outcome run(const JobSpec& job);

// Renders a report produced by run() as human-readable text.
std::string render_text(const std::string& command, const nlohmann::json& report);

// An array of job objects {"name", "command", "pd" | "braid" | "rational" |
// "complex", "args", "basepoint", "emit"}; the report keeps manifest order.
// Malformed entries are reported with exit code 1 and do not stop the others.
nlohmann::json batch(const nlohmann::json& manifest, const JobSpec& defaults, int jobs);

std::string sha256_hex(const std::string& data);

// Stores one JSON document per key; writes go through a temporary file and a rename.
class ResultCache {
public:
    explicit ResultCache(std::string dir);
    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value) const;
    const std::string& dir() const { return dir_; }

private:
    std::string path(const std::string& key) const;
    std::string dir_;
};

// The cache directory: the flag value if non-empty, else $ZGKH_CACHE_DIR, else none.
std::string resolve_cache_dir(const std::string& flag);

int main(int argc, char** argv);

}  // namespace zgkh::cli
