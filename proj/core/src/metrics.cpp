#include "ljp/metrics.hpp"

#include <cstdio>

#include "ljp/error.hpp"

namespace ljp {

TaskMetrics metrics_from_confusion(const std::string& task, const Confusion& confusion) {
  const std::size_t k = confusion.size();
  for (const auto& row : confusion) {
    if (row.size() != k) throw DimensionError("confusion matrix must be square");
  }
  TaskMetrics m;
  m.task = task;
  m.confusion = confusion;
  std::size_t total = 0, correct = 0;
  std::vector<std::size_t> gold(k, 0), predicted(k, 0);
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t p = 0; p < k; ++p) {
      total += confusion[g][p];
      gold[g] += confusion[g][p];
      predicted[p] += confusion[g][p];
    }
    correct += confusion[g][g];
  }
  if (k == 0 || total == 0) return m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double tp = static_cast<double>(confusion[c][c]);
    const double precision = predicted[c] ? tp / static_cast<double>(predicted[c]) : 0.0;
    const double recall = gold[c] ? tp / static_cast<double>(gold[c]) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    p_sum += precision;
    r_sum += recall;
    f_sum += f1;
  }
  const double kd = static_cast<double>(k);
  m.macro_precision = p_sum / kd;
  m.macro_recall = r_sum / kd;
  m.macro_f1 = f_sum / kd;
  return m;
}

std::string format_report_tsv(const EvalReport& report) {
  std::string out = "task\taccuracy\tmacro_precision\tmacro_recall\tmacro_f1\n";
  char buf[256];
  for (const auto& t : report.tasks) {
    std::snprintf(buf, sizeof buf, "%s\t%.17g\t%.17g\t%.17g\t%.17g\n", t.task.c_str(), t.accuracy,
                  t.macro_precision, t.macro_recall, t.macro_f1);
    out += buf;
  }
  return out;
}

std::string format_report_table(const EvalReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %8s %8s\n", "task", "Acc.", "MP", "MR", "F1");
  out += buf;
  for (const auto& t : report.tasks) {
    std::snprintf(buf, sizeof buf, "%-10s %8.4f %8.4f %8.4f %8.4f\n", t.task.c_str(), t.accuracy,
                  t.macro_precision, t.macro_recall, t.macro_f1);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "(%zu cases)\n", report.cases);
  out += buf;
  return out;
}

}  // namespace ljp
