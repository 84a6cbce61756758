#include "ljp/task_graph.hpp"

#include <set>

#include "ljp/error.hpp"

namespace ljp {

TaskGraph::TaskGraph(std::vector<TaskSpec> tasks, std::vector<TaskEdge> edges)
    : tasks_(std::move(tasks)), edges_(std::move(edges)) {
  if (tasks_.empty()) throw TopologyError("task graph has no tasks");
  std::set<std::string> ids;
  for (const auto& t : tasks_) {
    if (t.id.empty()) throw TopologyError("task with empty id");
    if (t.classes == 0) throw TopologyError("task '" + t.id + "' has zero classes");
    if (!ids.insert(t.id).second) throw TopologyError("duplicate task id '" + t.id + "'");
  }
  const std::size_t n = tasks_.size();
  pre_.assign(n, {});
  follow_.assign(n, {});
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges_) {
    if (e.from >= n || e.to >= n) throw TopologyError("edge references unknown task");
    if (e.from == e.to) throw TopologyError("self-loop on task '" + tasks_[e.from].id + "'");
    if (!seen.insert({e.from, e.to}).second) {
      throw TopologyError("duplicate edge " + tasks_[e.from].id + " -> " + tasks_[e.to].id);
    }
    pre_[e.to].push_back(e.from);
    follow_[e.from].push_back(e.to);
  }

  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : edges_) ++indegree[e.to];
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    const std::size_t next = *ready.begin();
    ready.erase(ready.begin());
    order_.push_back(next);
    for (std::size_t f : follow_[next]) {
      if (--indegree[f] == 0) ready.insert(f);
    }
  }
  if (order_.size() != n) throw TopologyError("task graph contains a cycle");
}

TaskGraph TaskGraph::legal_default(std::size_t law_classes, std::size_t charge_classes,
                                   std::size_t penalty_classes) {
  return TaskGraph({{"law", law_classes}, {"charge", charge_classes}, {"penalty", penalty_classes}},
                   {{0, 1}, {0, 2}, {1, 2}});
}

TaskGraph TaskGraph::from_ids(std::vector<TaskSpec> tasks,
                              const std::vector<std::pair<std::string, std::string>>& edges) {
  auto lookup = [&tasks](const std::string& id) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].id == id) return i;
    }
    throw TopologyError("edge references unknown task '" + id + "'");
  };
  std::vector<TaskEdge> resolved;
  for (const auto& [from, to] : edges) resolved.push_back({lookup(from), lookup(to)});
  return TaskGraph(std::move(tasks), std::move(resolved));
}

std::optional<std::size_t> TaskGraph::find(const std::string& id) const {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t TaskGraph::index_of(const std::string& id) const {
  if (auto i = find(id)) return *i;
  throw TopologyError("unknown task '" + id + "'");
}

bool TaskGraph::has_edge(std::size_t from, std::size_t to) const {
  for (const auto& e : edges_) {
    if (e.from == from && e.to == to) return true;
  }
  return false;
}

std::size_t TaskGraph::edge_index(std::size_t from, std::size_t to) const {
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (edges_[k].from == from && edges_[k].to == to) return k;
  }
  throw TopologyError("no edge " + std::to_string(from) + " -> " + std::to_string(to));
}

std::vector<std::pair<std::string, std::string>> TaskGraph::edge_ids() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : edges_) out.emplace_back(tasks_[e.from].id, tasks_[e.to].id);
  return out;
}

}  // namespace ljp
