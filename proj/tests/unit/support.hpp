#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>

// Message of the exception thrown by f, or "" when nothing is thrown.
template <typename F>
std::string thrown_message(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

inline bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("rfanogan-" + name + "-" + std::to_string(rng() % 1000000000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

#ifndef RFANOGAN_TEST_DATA
#define RFANOGAN_TEST_DATA "tests/data"
#endif

inline std::filesystem::path test_data(const std::string& name) {
  return std::filesystem::path(RFANOGAN_TEST_DATA) / name;
}
