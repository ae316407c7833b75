#include <lexreg/hash.hpp>

#include <array>
#include <fstream>

#include <openssl/evp.h>

#include <lexreg/error.hpp>

namespace lexreg {

namespace {

std::string to_hex(const unsigned char* digest, unsigned len) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(digits[digest[i] >> 4]);
    out.push_back(digits[digest[i] & 0xF]);
  }
  return out;
}

EVP_MD_CTX* as_ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }

}  // namespace

sha256_builder::sha256_builder() : ctx_(EVP_MD_CTX_new()) {
  require(ctx_ != nullptr && EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) == 1, errc::io_error,
          "SHA-256 initialization failed");
}

sha256_builder::~sha256_builder() { EVP_MD_CTX_free(as_ctx(ctx_)); }

sha256_builder& sha256_builder::update(std::string_view data) {
  EVP_DigestUpdate(as_ctx(ctx_), data.data(), data.size());
  return *this;
}

sha256_builder& sha256_builder::field(std::string_view data) {
  std::string len = std::to_string(data.size()) + ":";
  update(len);
  return update(data);
}

std::string sha256_builder::hex() {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned len = 0;
  EVP_DigestFinal_ex(as_ctx(ctx_), digest.data(), &len);
  return to_hex(digest.data(), len);
}

std::string sha256_hex(std::string_view data) { return sha256_builder().update(data).hex(); }

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::missing_artifact, "cannot open " + path.string());
  sha256_builder h;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

}  // namespace lexreg
