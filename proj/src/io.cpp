#include "fermi_slab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fermi_slab/errors.hpp"

namespace fslab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_meta(std::ostream& out, const CsvMetadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  const std::string t = trim(token);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  const auto res = std::from_chars(first, last, value);
  if (t.empty() || res.ec != std::errc() || res.ptr != last) {
    throw InvalidArgument("not a number: '" + t + "'");
  }
  return value;
}

void write_density_csv(const std::filesystem::path& path, const CsvMetadata& meta, const DensityColumns& cols) {
  auto out = open_for_write(path);
  write_meta(out, meta);
  out << "z,nu,rho_Q,rho_total,V\n";
  for (std::size_t i = 0; i < cols.z.size(); ++i) {
    out << format_double(cols.z[i]) << ',' << format_double(cols.nu[i]) << ',' << format_double(cols.rho_Q[i]) << ','
        << format_double(cols.rho_total[i]) << ',' << format_double(cols.V[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

DensityTable read_density_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  DensityTable table;
  std::string line;
  std::vector<std::string> header;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq != std::string::npos) table.meta[trim(t.substr(1, eq - 1))] = trim(t.substr(eq + 1));
      continue;
    }
    if (header.empty()) {
      header = split_commas(t);
      if (header != std::vector<std::string>{"z", "nu", "rho_Q", "rho_total", "V"}) {
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": expected header z,nu,rho_Q,rho_total,V");
      }
      continue;
    }
    const auto cells = split_commas(t);
    if (cells.size() != 5) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 5 columns");
    }
    try {
      table.cols.z.push_back(parse_double(cells[0]));
      table.cols.nu.push_back(parse_double(cells[1]));
      table.cols.rho_Q.push_back(parse_double(cells[2]));
      table.cols.rho_total.push_back(parse_double(cells[3]));
      table.cols.V.push_back(parse_double(cells[4]));
    } catch (const InvalidArgument& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (header.empty()) throw IoError(path.string() + ": no CSV header found");
  return table;
}

DensityProfile read_defect_csv(const std::filesystem::path& path, const GridSpec& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open defect file " + path.string());
  std::vector<double> z, nu;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split_commas(t);
    if (!header_seen) {
      header_seen = true;
      if (cells == std::vector<std::string>{"z", "nu"}) continue;
    }
    if (cells.size() != 2) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 2 columns z,nu");
    try {
      z.push_back(parse_double(cells[0]));
      nu.push_back(parse_double(cells[1]));
    } catch (const InvalidArgument& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (static_cast<int>(z.size()) != grid.size()) {
    throw GridMismatch("defect file " + path.string() + " has " + std::to_string(z.size()) + " rows, grid has " +
                       std::to_string(grid.size()) + " nodes");
  }
  for (int i = 0; i < grid.size(); ++i) {
    if (std::abs(z[static_cast<std::size_t>(i)] - grid.node(i)) > 1e-9 * std::max(1.0, grid.half_length())) {
      throw GridMismatch("defect file " + path.string() + ": node " + std::to_string(i) + " is at z = " +
                         format_double(z[static_cast<std::size_t>(i)]) + ", grid expects " +
                         format_double(grid.node(i)));
    }
  }
  return DensityProfile(grid, std::move(nu));
}

void write_msweep_csv(const std::filesystem::path& path, const CsvMetadata& meta, const std::vector<MSweepRow>& rows) {
  auto out = open_for_write(path);
  write_meta(out, meta);
  out << "m,I,charge,iterations\n";
  for (const auto& r : rows) {
    out << format_double(r.m) << ',' << format_double(r.I) << ',' << format_double(r.charge) << ',' << r.iterations
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_for_write(path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace fslab
