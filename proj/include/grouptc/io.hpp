#pragma once

#include <string>
#include <vector>

namespace gtc {

/// Shortest round-trip decimal for a double; integral values print bare ("8", "-2").
std::string format_number(double v);

/// Parses a number written by format_number (or any strtod-compatible form).
double parse_number(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Reads a signal CSV. Accepted layouts: one value per line, or rows
/// "index,value". Lines starting with '#' and non-numeric header lines are skipped.
std::vector<double> parse_signal_csv(const std::string& text);

/// Reads a matrix CSV: one row per line, comma separated, '#' comments and a
/// non-numeric header line skipped.
std::vector<std::vector<double>> parse_matrix_csv(const std::string& text);

std::string signal_to_csv(const std::vector<double>& values);

}  // namespace gtc
