#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lexreg {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

class sha256_builder {
 public:
  sha256_builder();
  ~sha256_builder();
  sha256_builder(const sha256_builder&) = delete;
  sha256_builder& operator=(const sha256_builder&) = delete;

  sha256_builder& update(std::string_view data);
  // Length-prefixed so that ("ab", "c") and ("a", "bc") differ.
  sha256_builder& field(std::string_view data);
  std::string hex();

 private:
  void* ctx_;
};

}  // namespace lexreg
