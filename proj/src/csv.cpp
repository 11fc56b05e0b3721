#include "svarwb/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "svarwb/errors.hpp"

namespace svarwb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  out.push_back(trim(cell));
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

double CsvTable::number(int row, int col) const {
  const std::string& cell = rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
    fail(ErrorCode::IoError, "row " + std::to_string(row + 2) + ", column '" + header[static_cast<std::size_t>(col)] +
                                 "': '" + cell + "' is not a number");
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open data file " + path.string());
  CsvTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      fail(ErrorCode::IoError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                   std::to_string(t.header.size()) + " fields");
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) fail(ErrorCode::IoError, path.string() + ": missing header row");
  return t;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + quote(header[i]);
  text_ += '\n';
}

CsvWriter& CsvWriter::add(std::string cell) {
  if (filled_ == columns_) fail(ErrorCode::InvalidArgument, "too many CSV fields in a row");
  text_ += (filled_++ ? "," : "") + quote(cell);
  return *this;
}

CsvWriter& CsvWriter::add(double v) { return add(format_number(v)); }
CsvWriter& CsvWriter::add(int v) { return add(std::to_string(v)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) fail(ErrorCode::InvalidArgument, "CSV row is missing fields");
  text_ += '\n';
  filled_ = 0;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace svarwb
