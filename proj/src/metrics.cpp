#include "cafe/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "cafe/errors.hpp"

namespace cafe {

namespace {

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_metrics(const std::vector<MetricsRow>& rows, const std::string& path) {
  if (rows.empty()) throw UsageError("write_metrics: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open metrics file for writing: " + path);

  out << "round,acc,loss";
  for (size_t c = 0; c < rows.front().per_class_acc.size(); ++c) out << ",perclass" << c;
  out << ",participation,secs\n";

  for (const auto& row : rows) {
    out << row.round << ',' << fmt(row.acc, "%.6f") << ',' << fmt(row.loss, "%.6f");
    for (double v : row.per_class_acc) out << ',' << fmt(v, "%.6f");
    out << ',' << fmt(row.participation, "%.4f") << ',' << fmt(row.secs, "%.3f") << '\n';
  }
  if (!out) throw IoError("failed while writing metrics file: " + path);
}

void emit_plot_data(const std::vector<MetricsRow>& rows, const std::string& method, uint64_t seed,
                    const std::string& path) {
  if (rows.empty()) throw UsageError("emit_plot_data: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open plot file for writing: " + path);
  out << "method,seed,round,metric,value\n";
  for (const auto& row : rows) {
    out << method << ',' << seed << ',' << row.round << ",acc," << fmt(row.acc, "%.6f") << '\n';
    out << method << ',' << seed << ',' << row.round << ",loss," << fmt(row.loss, "%.6f") << '\n';
  }
  if (!out) throw IoError("failed while writing plot file: " + path);
}

}  // namespace cafe
