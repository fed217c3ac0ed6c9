#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clickbait {

// Error categories map onto CLI exit codes: usage/config -> 1, data -> 2,
// training -> 3.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a, used for config and corpus fingerprints. Stable across platforms,
// unlike std::hash.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed_state);
std::string to_hex(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Quotes a CSV field when it contains a comma, quote, whitespace or newline.
std::string csv_escape(std::string_view field);

// Shortest round-trip decimal form (std::to_chars); reparsing gives the
// exact same bits, which keeps CSV/report output deterministic.
std::string format_double(double v);

std::string lower_ascii(std::string_view s);

// Resolution order for the bundled lexicon directory: explicit override,
// CLICKBAIT_DATA_DIR env var, compiled-in source path.
std::string default_data_dir();

// Runs fn(i) for i in [0, task_count) across a worker pool. Task order is
// unspecified, so callers must key results by task index to stay independent
// of the thread count. threads == 0 means hardware concurrency. The first
// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t task_count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace clickbait
