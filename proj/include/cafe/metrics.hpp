#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cafe/linalg.hpp"

namespace cafe {

struct MetricsRow {
  int round = 0;
  double acc = 0.0;
  double loss = 0.0;
  Vec per_class_acc;
  double participation = 0.0;  // mean per-client participation count so far
  double secs = 0.0;
};

// CSV with header round,acc,loss,perclass0..perclassN,participation,secs.
// Fixed column order and fixed formatting, so identical rows produce
// identical bytes.
void write_metrics(const std::vector<MetricsRow>& rows, const std::string& path);

// Long-format companion for plotting tools: method,seed,round,metric,value
// with one line per (round, metric) pair.
void emit_plot_data(const std::vector<MetricsRow>& rows, const std::string& method, uint64_t seed,
                    const std::string& path);

}  // namespace cafe
