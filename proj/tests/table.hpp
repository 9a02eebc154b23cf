#pragma once

// Reads the CSV records the CLI writes: a `#` metadata block, a header row,
// then numeric or text cells.

#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace table {

struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::out_of_range("no column " + name);
  }
  double num(std::size_t row, const std::string& name) const {
    return std::strtod(rows.at(row).at(col(name)).c_str(), nullptr);
  }
  std::vector<double> column(const std::string& name) const {
    std::vector<double> v;
    for (std::size_t r = 0; r < rows.size(); ++r) v.push_back(num(r, name));
    return v;
  }
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

inline Table parse(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header && line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon != std::string::npos) t.meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

}  // namespace table
