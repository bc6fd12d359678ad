#include "vibronic/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace vibronic::csv {

std::vector<double> const &Table::column(std::string const &name) const
{
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return columns[c];
  throw std::out_of_range("csv: no column '" + name + "'");
}

std::string Table::meta(std::string const &key) const
{
  for (auto const &[k, v] : metadata)
    if (k == key) return v;
  throw std::out_of_range("csv: no metadata key '" + key + "'");
}

void Table::add_column(std::string name, std::vector<double> values)
{
  if (!columns.empty() && values.size() != rows()) throw std::invalid_argument("csv: column length mismatch");
  header.push_back(std::move(name));
  columns.push_back(std::move(values));
}

std::string format_number(double x)
{
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0; // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(double re, double im)
{
  std::string s = format_number(re);
  std::string i = format_number(im);
  if (i.front() != '-') i.insert(i.begin(), '+');
  return s + i + "i";
}

std::string to_string(Table const &t)
{
  if (t.header.size() != t.columns.size()) throw std::invalid_argument("csv: header and columns differ in count");
  std::string out;
  for (auto const &[k, v] : t.metadata) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos || v.find('\n') != std::string::npos)
      throw std::invalid_argument("csv: metadata key '" + k + "' is not representable");
    out += "# " + k + "=" + v + "\n";
  }
  for (std::size_t c = 0; c < t.header.size(); ++c) out += (c ? "," : "") + t.header[c];
  out += "\n";
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (t.columns[c].size() != t.rows()) throw std::invalid_argument("csv: ragged columns");
      if (c) out += ",";
      out += format_number(t.columns[c][r]);
    }
    out += "\n";
  }
  for (auto const &f : t.footer) out += "# " + f + "\n";
  return out;
}

namespace {

double parse_number(std::string const &s)
{
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double x = 0.0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("csv: bad number '" + s + "'");
  return x;
}

} // namespace

Table parse(std::string const &text)
{
  Table              t;
  std::istringstream in(text);
  std::string        line;
  bool               have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      std::string const body = line.substr(2);
      if (!have_header) {
        auto const eq = body.find('=');
        if (eq == std::string::npos) throw std::runtime_error("csv: metadata line without '='");
        t.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      } else
        t.footer.push_back(body);
      continue;
    }
    std::vector<std::string> cells;
    std::string              cell;
    std::istringstream       ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      t.header = cells;
      t.columns.assign(cells.size(), {});
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) throw std::runtime_error("csv: row width differs from the header");
    for (std::size_t c = 0; c < cells.size(); ++c) t.columns[c].push_back(parse_number(cells[c]));
  }
  if (!have_header) throw std::runtime_error("csv: no header line");
  return t;
}

void write_atomic(std::filesystem::path const &path, std::string const &contents)
{
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

void write(std::filesystem::path const &path, Table const &t) { write_atomic(path, to_string(t)); }

Table read(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

} // namespace vibronic::csv
