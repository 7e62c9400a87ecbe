#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace trainlab::cli {

enum class Format { tsv, json };

Format parse_format(const std::string& name);

/// Per-invocation state shared by every command.
struct Context {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
  Format format = Format::tsv;
  int verbosity = 1;  ///< 0 quiet, 1 warnings, 2 progress

  void warn(const std::string& message) const;
  void info(const std::string& message) const;
};

/// Runtime failure that maps to the domain exit code without a message of
/// its own, e.g. a --strict check that did not hold.
struct StrictFailure {};

using Cell = nlohmann::ordered_json;

/// Rows under fixed columns. TSV renders a header line and one line per row;
/// JSON renders an array of objects, or one object for a single-record table.
class Table {
 public:
  Table(std::string name, std::vector<std::string> columns, bool single_record = false);

  void add_row(std::vector<Cell> cells);
  const std::string& name() const { return name_; }

  void write_tsv(std::ostream& out) const;
  nlohmann::ordered_json to_json() const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  bool single_record_;
};

/// Numbers rounded to the fixed significant-digit policy; JSON output
/// carries the same values as TSV.
Cell number(double value);

/// Writes tables in the selected format: TSV tables separated by a blank
/// line, or one JSON document keyed by table name.
void emit(const Context& ctx, const std::vector<Table>& tables);

std::string cell_text(const Cell& cell);

}  // namespace trainlab::cli
