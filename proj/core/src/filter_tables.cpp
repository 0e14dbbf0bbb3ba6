#include "freqseg/filter_tables.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "freqseg/errors.hpp"

namespace freqseg {
namespace detail {
extern const std::string_view kEmbeddedFilterTables;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("filter tables line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::size_t parse_size(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
    throw FormatError("filter tables line " + std::to_string(line_no) + ": bad extent '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

FilterTables FilterTables::parse(std::string_view text) {
  FilterTables out;
  CoefficientTable* current = nullptr;
  std::string current_name;
  bool shaped = false;

  auto finish = [&] {
    if (current == nullptr) return;
    if (!shaped) current->cols = current->values.size();
    if (current->values.empty() || current->values.size() != current->rows * current->cols) {
      throw FormatError("filter table [" + current_name + "] has " + std::to_string(current->values.size()) +
                        " coefficients, expected " + std::to_string(current->rows * current->cols));
    }
  };

  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("filter tables line " + std::to_string(line_no) + ": unterminated section");
      finish();
      current_name = std::string(line.substr(1, line.size() - 2));
      if (out.tables_.count(current_name)) throw FormatError("duplicate filter table [" + current_name + "]");
      current = &out.tables_[current_name];
      shaped = false;
    } else if (line.starts_with("version ")) {
      out.version_ = static_cast<int>(parse_size(trim(line.substr(8)), line_no));
    } else if (line.starts_with("shape ")) {
      if (current == nullptr || !current->values.empty()) {
        throw FormatError("filter tables line " + std::to_string(line_no) + ": shape must open a section");
      }
      std::istringstream parts{std::string(line.substr(6))};
      std::string r, c;
      parts >> r >> c;
      current->rows = parse_size(r, line_no);
      current->cols = parse_size(c, line_no);
      shaped = true;
    } else {
      if (current == nullptr) {
        throw FormatError("filter tables line " + std::to_string(line_no) + ": coefficient outside a section");
      }
      current->values.push_back(parse_double(line, line_no));
    }
  }
  finish();
  if (out.version_ != 1) throw FormatError("unsupported filter tables version " + std::to_string(out.version_));
  return out;
}

FilterTables FilterTables::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open filter tables " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const FilterTables& FilterTables::embedded() {
  static const FilterTables tables = parse(detail::kEmbeddedFilterTables);
  return tables;
}

FilterTables FilterTables::resolve(const std::optional<std::filesystem::path>& path) {
  if (path) return load(*path);
  if (const char* env = std::getenv(kFilterTablesEnvVar); env != nullptr && *env != '\0') return load(env);
  return embedded();
}

const CoefficientTable& FilterTables::at(const std::string& name) const {
  const auto it = tables_.find(name);
  if (it == tables_.end()) throw FormatError("filter tables lack section [" + name + "]");
  return it->second;
}

std::vector<std::string> FilterTables::section_names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : tables_) names.push_back(name);
  return names;
}

}  // namespace freqseg
