#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace ragforge::jsonl {

class JsonlError : public std::runtime_error {
public:
    JsonlError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Calls `fn(line_number, parsed_object)` for every non-empty line.
/// Line numbers are 1-based. Malformed JSON raises JsonlError carrying
/// the offending line number.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(std::size_t, const nlohmann::json&)>& fn);

/// Reads the whole file into memory; throws std::runtime_error if unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes bytes atomically: writes to `path` + ".tmp", then renames.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace ragforge::jsonl
