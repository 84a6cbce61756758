#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ljp {

struct TaskSpec {
  std::string id;
  std::size_t classes = 0;
};

struct TaskEdge {
  std::size_t from = 0;  // pre-order task
  std::size_t to = 0;    // follow-up task
};

/// DAG of prediction tasks. Construction validates acyclicity and fixes a
/// topological order (Kahn's algorithm, lowest task index first).
class TaskGraph {
 public:
  TaskGraph(std::vector<TaskSpec> tasks, std::vector<TaskEdge> edges);

  /// Law -> charge, law -> penalty, charge -> penalty.
  static TaskGraph legal_default(std::size_t law_classes, std::size_t charge_classes,
                                 std::size_t penalty_classes);
  /// Builds a graph from task specs and (from-id, to-id) pairs.
  static TaskGraph from_ids(std::vector<TaskSpec> tasks,
                            const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t task_count() const noexcept { return tasks_.size(); }
  const std::vector<TaskSpec>& tasks() const noexcept { return tasks_; }
  const TaskSpec& task(std::size_t i) const { return tasks_.at(i); }
  std::size_t classes(std::size_t i) const { return tasks_.at(i).classes; }
  const std::vector<TaskEdge>& edges() const noexcept { return edges_; }

  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;
  /// Index into edges() of (from -> to); throws TopologyError if absent.
  std::size_t edge_index(std::size_t from, std::size_t to) const;
  bool has_edge(std::size_t from, std::size_t to) const;

  /// Pre-order tasks of i, in edge-list order (size p_i).
  const std::vector<std::size_t>& pre_order(std::size_t i) const { return pre_.at(i); }
  /// Follow-up tasks of i, in edge-list order (size u_i).
  const std::vector<std::size_t>& follow_up(std::size_t i) const { return follow_.at(i); }
  const std::vector<std::size_t>& topological_order() const noexcept { return order_; }

  std::vector<std::pair<std::string, std::string>> edge_ids() const;

 private:
  std::vector<TaskSpec> tasks_;
  std::vector<TaskEdge> edges_;
  std::vector<std::vector<std::size_t>> pre_;
  std::vector<std::vector<std::size_t>> follow_;
  std::vector<std::size_t> order_;
};

}  // namespace ljp
