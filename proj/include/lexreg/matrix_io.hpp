#pragma once

#include <filesystem>

#include <Eigen/Dense>
#include <json.hpp>

namespace lexreg {

// Binary matrix container:
//   8 bytes   magic "LXRGMAT1"
//   8 bytes   header length L (uint64, little endian)
//   L bytes   UTF-8 JSON header; "rows", "cols", "dtype" = "f64le" and
//             "layout" = "row-major" are always present
//   rows*cols IEEE-754 doubles, little endian, row-major
struct matrix_file {
  nlohmann::json header;
  Eigen::MatrixXd values;
};

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                  nlohmann::json header = nlohmann::json::object());
matrix_file read_matrix(const std::filesystem::path& path);

}  // namespace lexreg
