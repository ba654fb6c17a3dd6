#pragma once

#include <string>
#include <vector>

namespace aquarl {

// All numeric output uses 6 significant digits so artifacts compare
// byte-for-byte across runs and platforms.
std::string format_number(double value);
std::string format_number(int value);

// Joins already-formatted cells with commas; no quoting (values never
// contain commas in this project's artifacts).
std::string csv_join(const std::vector<std::string>& cells);

// Line-oriented helpers; both throw std::runtime_error on I/O failure.
void write_lines(const std::string& path, const std::vector<std::string>& lines);
std::vector<std::string> read_lines(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

} // namespace aquarl
