#pragma once

// Numeric CSV with leading "# key=value" metadata lines and trailing "# ..."
// footer lines. Numbers are printed with 17 significant digits so a write/read
// round trip is exact and repeated runs are byte-identical.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace vibronic::csv {

struct Table
{
  std::vector<std::pair<std::string, std::string>> metadata; // in file order
  std::vector<std::string>                         header;
  std::vector<std::vector<double>>                 columns;  // columns[c][row]
  std::vector<std::string>                         footer;   // comment text after the data

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  // Column by header name; throws std::out_of_range.
  std::vector<double> const &column(std::string const &name) const;
  std::string                meta(std::string const &key) const;
  void                       add_column(std::string name, std::vector<double> values);
};

std::string format_number(double x);
std::string format_complex(double re, double im); // "re+imi" with 17 digits each

std::string to_string(Table const &t);
Table       parse(std::string const &text);

// Writes to a temporary file in the same directory, then renames over `path`.
void  write_atomic(std::filesystem::path const &path, std::string const &contents);
void  write(std::filesystem::path const &path, Table const &t);
Table read(std::filesystem::path const &path);

} // namespace vibronic::csv
