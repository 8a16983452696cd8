#include "grouptc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "grouptc/error.hpp"

namespace gtc {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  if (std::isfinite(v) && std::abs(v) < 1e15 && v == std::trunc(v)) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  const char* begin = text.data();
  while (*begin == ' ' || *begin == '\t') ++begin;
  const char* end = text.data() + text.size();
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double v = 0.0;
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) throw Error(ErrorKind::ParseError, "not a number: '" + text + "'");
  return v;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

bool try_parse_row(const std::string& line, std::vector<double>& row) {
  row.clear();
  for (const auto& cell : split(line, ',')) {
    try {
      row.push_back(parse_number(cell));
    } catch (const Error&) {
      return false;
    }
  }
  return !row.empty();
}

}  // namespace

std::vector<std::vector<double>> parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool header_skipped = false;
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!try_parse_row(line, row)) {
      if (rows.empty() && !header_skipped) {
        header_skipped = true;
        continue;
      }
      throw Error(ErrorKind::ParseError, "bad CSV row: '" + line + "'");
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> parse_signal_csv(const std::string& text) {
  std::vector<double> values;
  for (const auto& row : parse_matrix_csv(text)) {
    if (row.size() == 1)
      values.push_back(row[0]);
    else if (row.size() == 2)
      values.push_back(row[1]);
    else
      throw Error(ErrorKind::ParseError, "signal rows must have one or two columns");
  }
  return values;
}

std::string signal_to_csv(const std::vector<double>& values) {
  std::ostringstream os;
  os << "# v1\nelement,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) os << i << ',' << format_number(values[i]) << '\n';
  return os.str();
}

}  // namespace gtc
