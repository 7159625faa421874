#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dlab/errors.hpp"
#include "dlab/version.hpp"

namespace dlab {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char ch : data) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// 17 significant digits round-trip doubles losslessly.
inline std::string format_double17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct OutputMeta {
  std::string command_line;
  std::string config_hash = "none";
};

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string cell_to_csv(const Cell& c) {
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<double>(c)) return format_double17(std::get<double>(c));
  return std::get<std::string>(c);
}

inline void write_csv(std::ostream& out, const Table& t, const OutputMeta& meta) {
  out << "# " << kToolName << " " << kVersion << "\n";
  out << "# command: " << meta.command_line << "\n";
  out << "# config-hash: " << meta.config_hash << "\n";
  for (size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << t.columns[j];
  out << "\n";
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << cell_to_csv(row[j]);
    out << "\n";
  }
}

// JSON mirror: the same records under "records", the file header under "meta".
inline void write_json(std::ostream& out, const Table& t, const OutputMeta& meta) {
  nlohmann::json doc;
  doc["meta"] = {{"tool", kToolName},
                 {"version", kVersion},
                 {"command", meta.command_line},
                 {"config_hash", meta.config_hash}};
  nlohmann::json records = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json rec;
    for (size_t j = 0; j < row.size(); ++j) {
      const Cell& c = row[j];
      if (std::holds_alternative<long long>(c))
        rec[t.columns[j]] = std::get<long long>(c);
      else if (std::holds_alternative<double>(c))
        rec[t.columns[j]] = std::get<double>(c);  // non-finite values serialize as null
      else
        rec[t.columns[j]] = std::get<std::string>(c);
    }
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  out << doc.dump(2) << "\n";
}

inline void write_table(const std::string& path, const std::string& format, const Table& t,
                        const OutputMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  if (format == "json")
    write_json(out, t, meta);
  else
    write_csv(out, t, meta);
}

}  // namespace dlab
