#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ljp {

/// Confusion matrix rows are gold classes, columns predicted classes.
using Confusion = std::vector<std::vector<std::size_t>>;

struct TaskMetrics {
  std::string task;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  /// Mean of per-class F1, not the harmonic mean of MP and MR.
  double macro_f1 = 0.0;
  Confusion confusion;
  bool operator==(const TaskMetrics&) const = default;
};

struct EvalReport {
  std::vector<TaskMetrics> tasks;
  std::size_t cases = 0;
  bool operator==(const EvalReport&) const = default;
};

/// Unweighted means over every class; 0/0 counts as 0.
TaskMetrics metrics_from_confusion(const std::string& task, const Confusion& confusion);

/// Tab-separated: task, accuracy, macro_precision, macro_recall, macro_f1.
std::string format_report_tsv(const EvalReport& report);
/// Aligned human-readable table.
std::string format_report_table(const EvalReport& report);

}  // namespace ljp
