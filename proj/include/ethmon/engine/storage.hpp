#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace ethmon::engine {

/// Writes to a sibling temp file, fsyncs, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Throws ConfigError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// UTC, second resolution plus milliseconds: 2024-05-01T12:00:00.123Z
std::string iso_timestamp();

/// Test seam: called with a stage name at each durable step of a save.
/// Throwing from it simulates a crash at that point.
void set_fault_hook(std::function<void(std::string_view stage)> hook);
void fault_point(std::string_view stage);

}  // namespace ethmon::engine
