#include "pitchside/export.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "pitchside/errors.hpp"

namespace pitchside {
namespace {

using ojson = nlohmann::ordered_json;

void put_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

template <class... Fields>
void put_row(std::string& out, const Fields&... fields) {
  bool first = true;
  ((out += first ? "" : ",", first = false, put_field(out, fields)), ...);
  out += '\n';
}

// RFC 4180 rows; the header row is returned too.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw CorpusFormatError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<std::string>> parse_table(std::string_view text,
                                                  std::initializer_list<std::string_view> header) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw CorpusFormatError("csv: missing header");
  const std::vector<std::string> expected(header.begin(), header.end());
  if (rows.front() != expected) throw CorpusFormatError("csv: unexpected header");
  rows.erase(rows.begin());
  for (const auto& r : rows) {
    if (r.size() != expected.size()) throw CorpusFormatError("csv: wrong field count");
  }
  return rows;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw CorpusFormatError("csv: bad number '" + s + "'");
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& s) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw CorpusFormatError("csv: bad integer '" + s + "'");
  }
  return v;
}

ojson optional_json(const auto& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

std::string edges_csv(const WeightedGraph& graph) {
  std::string out;
  put_row(out, "src", "dst", "weight");
  for (const auto& e : graph.edges()) {
    put_row(out, graph.id(e.src), graph.id(e.dst), format_double(e.weight));
  }
  return out;
}

std::string nodes_csv(const WeightedGraph& graph, const NodeAttributes& attributes) {
  std::string out;
  put_row(out, "id", "label", "category", "community");
  for (NodeIndex v = 0; v < graph.node_count(); ++v) {
    const auto& id = graph.id(v);
    std::string category, community;
    if (attributes.categories) {
      category = std::string(to_string(attributes.categories->category(id)));
    } else if (attributes.profiles) {
      auto it = attributes.profiles->find(id);
      if (it != attributes.profiles->end() && it->second.annotation) {
        category = std::string(to_string(*it->second.annotation));
      }
    }
    if (attributes.partition) {
      if (auto c = attributes.partition->community_of(id)) community = std::to_string(*c);
    }
    put_row(out, id, attributes.hashtags ? "#" + id : id, category, community);
  }
  return out;
}

std::string attach_partition(std::string_view nodes_csv, const Partition& partition) {
  std::string out;
  put_row(out, "id", "label", "category", "community");
  for (const auto& r : parse_table(nodes_csv, {"id", "label", "category", "community"})) {
    const auto c = partition.community_of(r[0]);
    put_row(out, r[0], r[1], r[2], c ? std::to_string(*c) : std::string());
  }
  return out;
}

WeightedGraph graph_from_csv(std::string_view edges, std::string_view nodes, bool directed) {
  GraphBuilder b(directed);
  for (const auto& r : parse_table(nodes, {"id", "label", "category", "community"})) b.add_node(r[0]);
  for (const auto& r : parse_table(edges, {"src", "dst", "weight"})) {
    b.add_edge(r[0], r[1], parse_double(r[2]));
  }
  return b.build();
}

std::string partition_csv(const Partition& partition) {
  std::string out;
  put_row(out, "node", "community");
  for (std::size_t i = 0; i < partition.nodes.size(); ++i) {
    put_row(out, partition.nodes[i], std::to_string(partition.assignment[i]));
  }
  return out;
}

Partition partition_from_csv(std::string_view csv) {
  std::vector<std::string> nodes;
  std::vector<std::uint32_t> assignment;
  for (auto& r : parse_table(csv, {"node", "community"})) {
    nodes.push_back(std::move(r[0]));
    assignment.push_back(parse_int<std::uint32_t>(r[1]));
  }
  return make_partition(std::move(nodes), std::move(assignment));
}

std::string centrality_csv(const CentralityTable& table, const ProfileIndex& profiles) {
  const auto ranked = top_influencers(table, profiles, table.nodes.size());
  std::string out;
  put_row(out, "rank", "node", "score", "actor_type");
  for (const auto& r : ranked) {
    put_row(out, std::to_string(r.rank), r.node, format_double(r.score),
            std::string(to_string(r.actor_type)));
  }
  return out;
}

std::string matrix_csv(const BipartiteMatrix& matrix) {
  std::string out;
  put_row(out, "user", "hashtag", "count");
  for (std::size_t u = 0; u < matrix.users.size(); ++u) {
    for (const auto& e : matrix.rows[u]) {
      put_row(out, matrix.users[u], matrix.hashtags[e.col], std::to_string(e.count));
    }
  }
  return out;
}

BipartiteMatrix matrix_from_csv(std::string_view csv) {
  const auto rows = parse_table(csv, {"user", "hashtag", "count"});
  BipartiteMatrix m;
  for (const auto& r : rows) {
    m.users.push_back(r[0]);
    m.hashtags.push_back(r[1]);
  }
  auto unique_sorted = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(m.users);
  unique_sorted(m.hashtags);
  m.rows.resize(m.users.size());
  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::uint32_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };
  for (const auto& r : rows) {
    m.rows[index_of(m.users, r[0])].push_back(
        {index_of(m.hashtags, r[1]), parse_int<std::uint32_t>(r[2])});
  }
  for (auto& row : m.rows) {
    std::sort(row.begin(), row.end(), [](auto a, auto b) { return a.col < b.col; });
  }
  return m;
}

std::string global_metrics_json(const std::map<std::string, GlobalMetrics>& metrics) {
  ojson j = ojson::object();
  for (const auto& [name, g] : metrics) {
    ojson e;
    e["node_count"] = g.node_count;
    e["edge_count"] = g.edge_count;
    e["density"] = g.density;
    e["avg_degree"] = g.avg_degree;
    e["avg_clustering"] = g.avg_clustering;
    e["component_count"] = g.component_count;
    e["giant_component_fraction"] = g.giant_component_fraction;
    e["giant_component_size"] = g.giant_component_size;
    e["avg_path_length"] = optional_json(g.avg_path_length);
    e["diameter"] = optional_json(g.diameter);
    j[name] = std::move(e);
  }
  return j.dump(2) + "\n";
}

std::string themes_json(std::span<const CompositionVector> compositions,
                        const ThemeAssignment& themes) {
  ojson j;
  ojson comms = ojson::array();
  for (std::size_t i = 0; i < compositions.size(); ++i) {
    const auto& c = compositions[i];
    ojson e;
    e["community"] = c.community;
    e["size"] = c.size;
    ojson props;
    for (std::size_t k = 0; k < 4; ++k) {
      props[std::string(to_string(static_cast<HashtagCategory>(k)))] = c.proportions[k];
    }
    e["proportions"] = std::move(props);
    if (i < themes.cluster.size()) {
      e["cluster"] = themes.cluster[i];
      e["theme"] = std::string(to_string(themes.cluster_theme[themes.cluster[i]]));
    }
    comms.push_back(std::move(e));
  }
  j["communities"] = std::move(comms);
  ojson clusters = ojson::array();
  for (std::size_t k = 0; k < themes.cluster_theme.size(); ++k) {
    clusters.push_back({{"cluster", k}, {"theme", std::string(to_string(themes.cluster_theme[k]))}});
  }
  j["clusters"] = std::move(clusters);
  ojson linkage = ojson::array();
  for (const auto& s : themes.linkage) {
    linkage.push_back({s.left, s.right, s.height, s.size});
  }
  j["linkage"] = std::move(linkage);
  return j.dump(2) + "\n";
}

std::string engagement_json(const EngagementResult& engagement) {
  ojson j;
  ojson profiles = ojson::array();
  for (const auto& p : engagement.profiles) {
    ojson e;
    e["user_community"] = p.user_community;
    e["size"] = p.size;
    ojson sectors = ojson::array();
    for (const auto& s : p.sectors) {
      ojson sj;
      sj["hashtag_community"] = s.hashtag_community;
      sj["theme"] = s.theme ? ojson(std::string(to_string(*s.theme))) : ojson(nullptr);
      sj["count"] = s.count;
      sectors.push_back(std::move(sj));
    }
    e["sectors"] = std::move(sectors);
    profiles.push_back(std::move(e));
  }
  j["profiles"] = std::move(profiles);
  j["users_not_in_matrix"] = engagement.users_not_in_matrix;
  j["hashtags_not_in_matrix"] = engagement.hashtags_not_in_matrix;
  j["excluded_communities"] = engagement.excluded_communities;
  return j.dump(2) + "\n";
}

std::string findings_jsonl(std::span<const InfluenceFinding> findings) {
  std::string out;
  for (const auto& f : findings) {
    out += serialize_finding(f);
    out += '\n';
  }
  return out;
}

}  // namespace pitchside
