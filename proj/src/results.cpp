#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "wavicle/cli.hpp"
#include "wavicle/results.hpp"

namespace wavicle {
namespace cli {

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  if (path.empty()) throw IoError("output path is empty");
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed while writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ec2;
    std::filesystem::remove(tmp, ec2);
    throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

std::string to_csv(const Table& table) {
  std::string out;
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const std::vector<double>& row : table.data) {
    if (row.size() != table.columns.size())
      throw std::logic_error("Table: row width does not match column count");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_real(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table, const RunMetadata& meta) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json m;
  m["version"] = meta.version;
  m["kind"] = meta.kind;
  m["seed"] = meta.seed;
  m["trials"] = meta.trials;
  nlohmann::ordered_json cfg;
  for (const auto& [key, value] : meta.resolved_config) cfg[key] = value;
  m["config"] = std::move(cfg);
  doc["metadata"] = std::move(m);
  doc["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const std::vector<double>& row : table.data) {
    if (row.size() != table.columns.size())
      throw std::logic_error("Table: row width does not match column count");
    nlohmann::ordered_json obj;
    for (size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace

const std::vector<std::string>& fixed_columns() {
  static const std::vector<std::string> cols = {
      "mc_mean_a", "stderr_a",      "mc_mean_b",   "stderr_b",     "mc_mean_ab", "stderr_ab",
      "mc_uncorr", "mc_corr",       "oracle_uncorr", "oracle_corr", "oracle_total", "z_score"};
  return cols;
}

Table to_table(const std::vector<ResultRow>& rows, ExperimentKind kind) {
  Table table;
  table.columns = scan_columns(kind);
  const std::vector<std::string>& fixed = fixed_columns();
  table.columns.insert(table.columns.end(), fixed.begin(), fixed.end());
  for (const ResultRow& row : rows) {
    if (row.scan.size() != scan_columns(kind).size())
      throw std::logic_error("ResultRow: scan block does not match the experiment");
    std::vector<double> values;
    values.reserve(table.columns.size());
    for (size_t i = 0; i < row.scan.size(); ++i) {
      if (row.scan[i].first != table.columns[i])
        throw std::logic_error("ResultRow: scan column name mismatch");
      values.push_back(row.scan[i].second);
    }
    values.push_back(row.mc_mean_a);
    values.push_back(row.stderr_a);
    values.push_back(row.mc_mean_b);
    values.push_back(row.stderr_b);
    values.push_back(row.mc_mean_ab);
    values.push_back(row.stderr_ab);
    values.push_back(row.mc_uncorr);
    values.push_back(row.mc_corr);
    values.push_back(row.oracle_uncorr);
    values.push_back(row.oracle_corr);
    values.push_back(row.oracle_total);
    values.push_back(row.z_score);
    table.data.push_back(std::move(values));
  }
  return table;
}

void write_table(const Table& table, OutputFormat format, const std::string& path,
                 const RunMetadata& meta) {
  atomic_write(path, format == OutputFormat::Csv ? to_csv(table) : to_json(table, meta));
}

void write_results(const std::vector<ResultRow>& rows, ExperimentKind kind, OutputFormat format,
                   const std::string& path, const RunMetadata& meta) {
  write_table(to_table(rows, kind), format, path, meta);
}

}  // namespace cli
}  // namespace wavicle
