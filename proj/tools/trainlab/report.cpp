#include "trainlab/report.hpp"

#include <cstdlib>
#include <ostream>
#include <stdexcept>

#include "trainlab/numeric_format.hpp"

namespace trainlab::cli {

Format parse_format(const std::string& name) {
  if (name == "tsv") return Format::tsv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown output format '" + name + "' (expected tsv or json)");
}

void Context::warn(const std::string& message) const {
  if (verbosity >= 1) err << "warning: " << message << '\n';
}

void Context::info(const std::string& message) const {
  if (verbosity >= 2) err << message << '\n';
}

Table::Table(std::string name, std::vector<std::string> columns, bool single_record)
    : name_(std::move(name)), columns_(std::move(columns)), single_record_(single_record) {}

void Table::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size()) {
    throw std::logic_error("table '" + name_ + "': row has " + std::to_string(cells.size()) + " cells for " +
                           std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(cells));
}

Cell number(double value) { return std::strtod(format_number(value).c_str(), nullptr); }

std::string cell_text(const Cell& cell) {
  if (cell.is_null()) return "NA";
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_number_float()) return format_number(cell.get<double>());
  if (cell.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < cell.size(); ++i) {
      if (i > 0) s += ',';
      s += cell_text(cell[i]);
    }
    return s;
  }
  return cell.dump();
}

void Table::write_tsv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "\t" : "") << columns_[i];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "\t" : "") << cell_text(row[i]);
    }
    out << '\n';
  }
}

nlohmann::ordered_json Table::to_json() const {
  auto records = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      rec[columns_[i]] = row[i];
    }
    records.push_back(std::move(rec));
  }
  if (single_record_ && records.size() == 1) {
    return records[0];
  }
  return records;
}

void emit(const Context& ctx, const std::vector<Table>& tables) {
  if (ctx.format == Format::json) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& t : tables) {
      doc[t.name()] = t.to_json();
    }
    ctx.out << doc.dump() << '\n';
    return;
  }
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i > 0) ctx.out << '\n';
    tables[i].write_tsv(ctx.out);
  }
}

}  // namespace trainlab::cli
