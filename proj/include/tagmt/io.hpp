#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tagmt {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

// Lines without their terminators; a trailing '\r' is stripped.
std::vector<std::string> read_lines(const std::filesystem::path& p);
void write_lines(const std::filesystem::path& p,
                 std::span<const std::string> lines);

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);
std::string hash_file_hex(const std::filesystem::path& p);

}  // namespace tagmt
