#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "tagmt/io.hpp"

namespace test_util {

// Scratch directory under the build tree, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path() / "tagmt-tests";
    std::filesystem::create_directories(base);
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / (tag + "-" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp dir for " + tag);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name,
                             const std::string& content) const {
    auto p = path / name;
    tagmt::write_file(p, content);
    return p;
  }
};

}  // namespace test_util
