#include "henon/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "henon/errors.hpp"

namespace henon {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return sha256_hex(data);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path) {
  for (std::size_t i = 0; i < header.size(); ++i) buf_ += (i ? "," : "") + header[i];
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) buf_ += (i ? "," : "") + fmt(values[i]);
  buf_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) buf_ += (i ? "," : "") + cells[i];
  buf_ += '\n';
}

void CsvWriter::close() { write_text(path_, buf_); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("failed writing " + path);
}

void write_field_text(const std::string& path, const DiscreteField& u) {
  CsvWriter w(path, {"r", "u"});
  for (int i = 0; i < u.size(); ++i) w.row({u.mesh->r(i), u[i]});
  w.close();
}

namespace {
constexpr char kMagic[8] = {'H', 'N', 'F', 'I', 'E', 'L', 'D', '1'};
}

void write_field_binary(const std::string& path, const DiscreteField& u) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(kMagic, 8);
  const std::string& h = u.mesh->hash();
  const std::uint32_t hl = h.size();
  f.write(reinterpret_cast<const char*>(&hl), 4);
  f.write(h.data(), hl);
  const std::int32_t M = u.mesh->M(), n = u.mesh->dim();
  const double g = u.mesh->grading();
  f.write(reinterpret_cast<const char*>(&M), 4);
  f.write(reinterpret_cast<const char*>(&n), 4);
  f.write(reinterpret_cast<const char*>(&g), 8);
  f.write(reinterpret_cast<const char*>(u.values.data()), 8 * u.values.size());
  if (!f) throw IoError("failed writing " + path);
}

DiscreteField read_field_binary(const std::string& path, const MeshPtr& mesh) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a field file: " + path);
  std::uint32_t hl = 0;
  f.read(reinterpret_cast<char*>(&hl), 4);
  if (hl > 64) throw IoError("corrupt field file: " + path);
  std::string h(hl, '\0');
  f.read(h.data(), hl);
  if (h != mesh->hash()) throw MeshMismatch("field file was written on a different mesh");
  std::int32_t M = 0, n = 0;
  double g = 0;
  f.read(reinterpret_cast<char*>(&M), 4);
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&g), 8);
  Eigen::VectorXd v(M + 1);
  f.read(reinterpret_cast<char*>(v.data()), 8 * v.size());
  if (!f) throw IoError("truncated field file: " + path);
  return DiscreteField(mesh, v);
}

}  // namespace henon
