#pragma once

#include <string>
#include <vector>

namespace pmcmc {

struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
  std::vector<double> column(const std::string& name) const;
};

// Write/read rectangular numeric CSV with a header line. Values are written
// with enough digits to round-trip doubles exactly.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);
NumericTable read_csv(const std::string& path);

struct PriceSeries {
  std::vector<std::string> dates;
  std::vector<double> prices;
};

// `date,price` file with a mandatory header. Parse failures and non-positive
// prices are reported with their row number.
PriceSeries read_price_csv(const std::string& path);

}  // namespace pmcmc
