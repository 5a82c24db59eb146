// SPDX-License-Identifier: Apache-2.0
#include "metahet/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>

#include "metahet/error.hpp"

namespace metahet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

template <std::size_t N>
class Table {
 public:
  Table(std::istream& in, const std::array<std::string_view, N>& columns) : in_(in) {
    std::string header;
    while (std::getline(in_, header)) {
      ++line_;
      if (!is_blank(header)) break;
      header.clear();
    }
    if (is_blank(header)) {
      throw InputError(ErrorCode::SchemaMismatch, line_ == 0 ? 1 : line_, "missing header row");
    }
    const auto names = split_csv_record(header);
    index_.fill(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
      bool known = false;
      for (std::size_t j = 0; j < N; ++j) {
        if (names[c] == columns[j]) {
          if (index_[j] != names.size()) {
            throw InputError(ErrorCode::SchemaMismatch, line_, "duplicate column '" + names[c] + "'");
          }
          index_[j] = c;
          known = true;
        }
      }
      if (!known) {
        throw InputError(ErrorCode::SchemaMismatch, line_, "unexpected column '" + names[c] + "'");
      }
    }
    for (std::size_t j = 0; j < N; ++j) {
      if (index_[j] == names.size()) {
        throw InputError(ErrorCode::SchemaMismatch, line_,
                         "missing column '" + std::string(columns[j]) + "'");
      }
    }
    width_ = names.size();
  }

  // Advances to the next non-blank record; false at end of input.
  bool next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (is_blank(line)) continue;
      cells_ = split_csv_record(line);
      if (cells_.size() != width_) {
        throw InputError(ErrorCode::ParseError, line_,
                         "expected " + std::to_string(width_) + " cells, got " + std::to_string(cells_.size()));
      }
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }
  const std::string& text(std::size_t column) const { return cells_[index_[column]]; }

  double real(std::size_t column, std::string_view name) const {
    const std::string& cell = text(column);
    double value = 0.0;
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw InputError(ErrorCode::ParseError, line_,
                       "column '" + std::string(name) + "': '" + cell + "' is not a finite decimal number");
    }
    return value;
  }

  int integer(std::size_t column, std::string_view name) const {
    const std::string& cell = text(column);
    int value = 0;
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (cell.empty() || ec != std::errc() || ptr != end) {
      throw InputError(ErrorCode::ParseError, line_,
                       "column '" + std::string(name) + "': '" + cell + "' is not an integer");
    }
    return value;
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t width_ = 0;
  std::array<std::size_t, N> index_{};
  std::vector<std::string> cells_;
};

void require_two(std::size_t k) {
  if (k < 2) {
    throw InputError(ErrorCode::InsufficientStudies, 0,
                     "at least 2 studies are required, got " + std::to_string(k));
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(ErrorCode::ParseError, 0, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
    } else if (ch == '"' && trim(cell).empty()) {
      cell.clear();
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      cells.emplace_back(was_quoted ? cell : std::string(trim(cell)));
      cell.clear();
      was_quoted = false;
    } else if (!(was_quoted && (ch == ' ' || ch == '\t' || ch == '\r'))) {
      cell += ch;
    }
  }
  cells.emplace_back(was_quoted ? cell : std::string(trim(cell)));
  return cells;
}

std::vector<OneArmStudy> read_one_arm_studies(std::istream& in) {
  enum { kStudy, kY, kVar, kN };
  Table<4> table(in, {"study", "y", "var_y", "n"});
  std::vector<OneArmStudy> studies;
  while (table.next()) {
    OneArmStudy s;
    s.label = table.text(kStudy);
    s.y = table.real(kY, "y");
    s.var_y = table.real(kVar, "var_y");
    s.n = table.integer(kN, "n");
    if (!(s.var_y > 0.0)) {
      throw InputError(ErrorCode::InvalidVariance, table.line(), "var_y must be positive");
    }
    if (s.n < 1) {
      throw InputError(ErrorCode::InvalidArgument, table.line(), "n must be at least 1");
    }
    studies.push_back(std::move(s));
  }
  require_two(studies.size());
  return studies;
}

std::vector<TwoArmStudy> read_two_arm_studies(std::istream& in) {
  enum { kStudy, kYt, kNt, kSet, kYc, kNc, kSec };
  Table<7> table(in, {"study", "y_t", "n_t", "se_t", "y_c", "n_c", "se_c"});
  std::vector<TwoArmStudy> studies;
  while (table.next()) {
    TwoArmStudy s;
    s.label = table.text(kStudy);
    s.y_t = table.real(kYt, "y_t");
    s.n_t = table.integer(kNt, "n_t");
    s.se_t = table.real(kSet, "se_t");
    s.y_c = table.real(kYc, "y_c");
    s.n_c = table.integer(kNc, "n_c");
    s.se_c = table.real(kSec, "se_c");
    if (!(s.se_t > 0.0) || !(s.se_c > 0.0)) {
      throw InputError(ErrorCode::InvalidVariance, table.line(), "se_t and se_c must be positive");
    }
    if (s.n_t < 2 || s.n_c < 2) {
      throw InputError(ErrorCode::InsufficientDegreesOfFreedom, table.line(), "n_t and n_c must be at least 2");
    }
    studies.push_back(std::move(s));
  }
  require_two(studies.size());
  return studies;
}

MetaDataset parse_one_arm_csv(std::istream& in) {
  const auto studies = read_one_arm_studies(in);
  return MetaDataset::from_one_arm(studies);
}

MetaDataset parse_one_arm_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_one_arm_csv(in);
}

std::vector<TwoArmStudy> parse_two_arm_csv(std::istream& in) { return read_two_arm_studies(in); }

std::vector<TwoArmStudy> parse_two_arm_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_two_arm_studies(in);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string content_checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) out += kHex[(h >> shift) & 0xf];
  return out;
}

}  // namespace metahet
