#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pitchside/communities.hpp"
#include "pitchside/graph.hpp"
#include "pitchside/graphs.hpp"
#include "pitchside/influence.hpp"
#include "pitchside/metrics.hpp"

namespace pitchside {

// Writes `content` to a sibling temporary file and renames it over `path`,
// creating parent directories as needed. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

// src,dst,weight. One row per stored edge; undirected edges appear once.
std::string edges_csv(const WeightedGraph& graph);
// Sources for the node file columns. Any of them may be absent.
struct NodeAttributes {
  bool hashtags = false;                        // label nodes as "#id"
  const NodeAnnotations* categories = nullptr;  // hashtag category
  const ProfileIndex* profiles = nullptr;       // annotated actor type of a user
  const Partition* partition = nullptr;
};

// id,label,category,community. Columns left empty when no source is given.
std::string nodes_csv(const WeightedGraph& graph, const NodeAttributes& attributes = {});
// The same node file with its community column taken from `partition`.
std::string attach_partition(std::string_view nodes_csv, const Partition& partition);
// Rebuilds a graph from the two files above; isolates come from the node
// file. Throws CorpusFormatError on malformed rows.
WeightedGraph graph_from_csv(std::string_view edges, std::string_view nodes, bool directed);

// node,community in node order.
std::string partition_csv(const Partition& partition);
Partition partition_from_csv(std::string_view csv);

// rank,node,score,actor_type for every node, best first.
std::string centrality_csv(const CentralityTable& table, const ProfileIndex& profiles);

// user,hashtag,count for every nonzero cell.
std::string matrix_csv(const BipartiteMatrix& matrix);
BipartiteMatrix matrix_from_csv(std::string_view csv);

std::string global_metrics_json(const std::map<std::string, GlobalMetrics>& metrics);
std::string themes_json(std::span<const CompositionVector> compositions,
                        const ThemeAssignment& themes);
std::string engagement_json(const EngagementResult& engagement);
// One serialized finding per line.
std::string findings_jsonl(std::span<const InfluenceFinding> findings);

}  // namespace pitchside
