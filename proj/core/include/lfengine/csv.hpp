#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace lfengine {

/// Minimal CSV writer. Doubles are written with 17 significant digits so a
/// rerun of the same configuration reproduces output files byte for byte.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void begin_row();
  void add(double value);
  void add(const std::string& value);
  void add(std::size_t value);
  void end_row();

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool first_in_row_ = true;
};

std::string format_double(double value);

}  // namespace lfengine
