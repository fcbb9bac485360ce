#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace crs {

// Shortest decimal that parses back to the same double. NaN renders empty,
// infinities as "inf" / "-inf".
std::string format_double(double x);

// Missing values render as an empty field.
std::string cell(double x);
std::string cell(const std::optional<double>& x);
std::string cell(std::uint64_t x);
std::string cell(bool x);
std::string cell(std::string_view s);
inline std::string cell(const char* s) { return cell(std::string_view(s)); }

// Comma-separated rows with LF endings. Fields holding commas, quotes or
// newlines are quoted.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  std::size_t columns() const { return columns_; }

 private:
  void write(const std::vector<std::string>& fields);
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace crs
