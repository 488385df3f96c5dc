#pragma once

#include <string>
#include <vector>

#include "henon/mesh.hpp"

namespace henon {

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

// 17 significant digits, '.' separator, locale independent
std::string fmt(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);
  void close();

 private:
  std::string path_;
  std::string buf_;
};

// two-column text (r, u)
void write_field_text(const std::string& path, const DiscreteField& u);
// binary: magic, mesh hash, M, grading, n, values
void write_field_binary(const std::string& path, const DiscreteField& u);
DiscreteField read_field_binary(const std::string& path, const MeshPtr& mesh);

void write_text(const std::string& path, const std::string& text);

}  // namespace henon
