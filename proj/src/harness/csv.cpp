#include "strobo/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace strobo::harness {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, std::string_view header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), columns_(1) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  for (char c : header) columns_ += c == ',';
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_)
    throw std::logic_error("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(columns_));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("failed writing " + path_);
}

}  // namespace strobo::harness
