#include "pmcmc/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pmcmc {

namespace {
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

int NumericTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> NumericTable::column(const std::string& name) const {
  int idx = column_index(name);
  if (idx < 0) throw std::runtime_error("csv: missing column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  for (size_t i = 0; i < columns.size(); ++i)
    f << (i ? "," : "") << columns[i];
  f << "\n";
  char buf[32];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      f << (i ? "," : "") << buf;
    }
    f << "\n";
  }
  if (!f) throw std::runtime_error("csv: write failed for '" + path + "'");
}

NumericTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("csv: cannot open '" + path + "'");
  NumericTable table;
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error("csv: '" + path + "' is empty");
  for (const auto& c : split_line(line)) table.columns.push_back(trim(c));
  size_t row_no = 1;
  while (std::getline(f, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.columns.size())
      throw std::runtime_error("csv: row " + std::to_string(row_no) + " of '" +
                               path + "' has the wrong field count");
    std::vector<double> row;
    for (const auto& fstr : fields) {
      try {
        row.push_back(std::stod(trim(fstr)));
      } catch (const std::exception&) {
        throw std::runtime_error("csv: row " + std::to_string(row_no) + " of '" +
                                 path + "' is not numeric");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

PriceSeries read_price_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("prices: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error("prices: '" + path + "' is empty");
  auto header = split_line(line);
  if (header.size() < 2 || trim(header[0]) != "date" || trim(header[1]) != "price")
    throw std::runtime_error("prices: expected 'date,price' header in '" + path +
                             "'");
  PriceSeries out;
  size_t row_no = 1;
  while (std::getline(f, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (fields.size() < 2)
      throw std::runtime_error("prices: row " + std::to_string(row_no) +
                               " has fewer than two fields");
    double price;
    try {
      price = std::stod(trim(fields[1]));
    } catch (const std::exception&) {
      throw std::runtime_error("prices: row " + std::to_string(row_no) +
                               " has a non-numeric price");
    }
    if (!(price > 0.0) || !std::isfinite(price))
      throw std::runtime_error("prices: row " + std::to_string(row_no) +
                               " has a non-positive price");
    out.dates.push_back(trim(fields[0]));
    out.prices.push_back(price);
  }
  return out;
}

}  // namespace pmcmc
