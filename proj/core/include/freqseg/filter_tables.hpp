#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace freqseg {

/// One labeled section of the filter data file: a 1D sequence or, when a
/// `shape R C` line is present, a row-major R x C kernel.
struct CoefficientTable {
  std::size_t rows = 1;
  std::size_t cols = 0;
  std::vector<double> values;
};

/// Parsed filter data file.
///
/// Format (plain text):
///   # comment
///   version 1
///   [section.name]
///   shape R C        (optional)
///   <one coefficient per line>
class FilterTables {
 public:
  static FilterTables parse(std::string_view text);
  static FilterTables load(const std::filesystem::path& path);

  /// Tables compiled into the library from core/data/filter_tables.txt.
  static const FilterTables& embedded();

  /// `path` when given, else $FREQSEG_FILTERS when set, else embedded().
  static FilterTables resolve(const std::optional<std::filesystem::path>& path);

  int version() const noexcept { return version_; }
  bool contains(const std::string& name) const { return tables_.count(name) != 0; }
  /// Throws FormatError when the section is missing.
  const CoefficientTable& at(const std::string& name) const;
  std::vector<std::string> section_names() const;

 private:
  int version_ = 0;
  std::map<std::string, CoefficientTable> tables_;
};

inline constexpr const char* kFilterTablesEnvVar = "FREQSEG_FILTERS";

}  // namespace freqseg
