#include <lexreg/matrix_io.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <lexreg/error.hpp>

namespace lexreg {

static_assert(std::endian::native == std::endian::little, "matrix files assume a little-endian host");

namespace {
constexpr char magic[8] = {'L', 'X', 'R', 'G', 'M', 'A', 'T', '1'};
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& values, nlohmann::json header) {
  header["rows"] = values.rows();
  header["cols"] = values.cols();
  header["dtype"] = "f64le";
  header["layout"] = "row-major";
  std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out.write(magic, sizeof magic);
  std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = values;
  out.write(reinterpret_cast<const char*>(row_major.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(row_major.size())));
  require(out.good(), errc::io_error, "short write to " + path.string());
}

matrix_file read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::missing_artifact, "cannot open " + path.string());
  char head[8];
  in.read(head, sizeof head);
  require(in.good() && std::memcmp(head, magic, sizeof magic) == 0, errc::parse_error,
          path.string() + " is not a matrix file");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  require(in.good() && len < (1ull << 34), errc::parse_error, path.string() + ": bad header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  require(in.good(), errc::parse_error, path.string() + ": truncated header");
  matrix_file file;
  try {
    file.header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, path.string() + ": " + e.what());
  }
  auto rows = file.header.at("rows").get<Eigen::Index>();
  auto cols = file.header.at("cols").get<Eigen::Index>();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(rows, cols);
  in.read(reinterpret_cast<char*>(row_major.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows * cols)));
  require(static_cast<bool>(in) || (rows * cols == 0), errc::parse_error, path.string() + ": truncated payload");
  file.values = row_major;
  return file;
}

}  // namespace lexreg
