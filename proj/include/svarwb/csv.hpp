#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace svarwb {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  double number(int row, int col) const;
};

// Comma separated with a header row; fields may be double-quoted.
CsvTable read_csv(const std::filesystem::path& path);

// Shortest round-trip text for a double, identical on every run.
std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& add(std::string cell);
  CsvWriter& add(double v);
  CsvWriter& add(int v);
  void end_row();
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string text_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace svarwb
