#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lacldp::cli {

// %.17g; non-finite values print as inf, -inf, nan.
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  // Row cells must match the header width.
  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Finite doubles as numbers, others as the strings "inf", "-inf", "nan".
nlohmann::json json_number(double v);

// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// CRC-32 (IEEE) of the bytes, as 8 lowercase hex digits.
std::string crc32_hex(const std::string& bytes);

}  // namespace lacldp::cli
