#include "lfengine/csv.hpp"

#include <cstdio>

#include "lfengine/errors.hpp"

namespace lfengine {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::begin_row() { first_in_row_ = true; }

void CsvWriter::add(double value) { add(format_double(value)); }

void CsvWriter::add(std::size_t value) { add(std::to_string(value)); }

void CsvWriter::add(const std::string& value) {
  if (!first_in_row_) out_ << ',';
  out_ << value;
  first_in_row_ = false;
}

void CsvWriter::end_row() {
  out_ << '\n';
  if (!out_) throw IoError("write failure on " + path_.string());
}

}  // namespace lfengine
