#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mapf {

using NodeId = int;

// distance value for disconnected pairs
inline constexpr int kUnreachable = std::numeric_limits<int>::max();

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Cell {
  int x = 0;
  int y = 0;
};

inline bool operator==(const Cell& a, const Cell& b) { return a.x == b.x && a.y == b.y; }

// BFS distances to a fixed goal, one entry per node
struct DistanceTable {
  NodeId goal = 0;
  std::vector<int> dist;
};

// Undirected graph over NodeIds [0, node_count). Grids come from parse_map
// (NodeIds assigned row-major over passable cells); arbitrary graphs for
// gadget tests come from from_edges. Immutable after construction; the lazy
// per-goal distance cache is internally synchronized.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&& other) noexcept
      : adj_(std::move(other.adj_)),
        width_(other.width_),
        height_(other.height_),
        cell_to_node_(std::move(other.cell_to_node_)),
        node_to_cell_(std::move(other.node_to_cell_)),
        dist_cache_(std::move(other.dist_cache_)) {}
  Graph& operator=(Graph&&) = delete;

  // adjacency-list constructor (testing / gadget graphs)
  static Graph from_edges(int node_count, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    Graph g;
    g.adj_.assign(node_count, {});
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= node_count || v >= node_count || u == v)
        throw std::invalid_argument("from_edges: bad edge");
      g.adj_[u].push_back(v);
      g.adj_[v].push_back(u);
    }
    for (auto& nbrs : g.adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    g.node_to_cell_.resize(node_count);
    for (int v = 0; v < node_count; ++v) g.node_to_cell_[v] = Cell{v, 0};
    return g;
  }

  static Graph from_grid(int width, int height, const std::vector<char>& passable) {
    if (width <= 0 || height <= 0 || static_cast<int>(passable.size()) != width * height)
      throw std::invalid_argument("from_grid: bad dimensions");
    Graph g;
    g.width_ = width;
    g.height_ = height;
    g.cell_to_node_.assign(width * height, -1);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if (passable[y * width + x]) {
          g.cell_to_node_[y * width + x] = static_cast<int>(g.node_to_cell_.size());
          g.node_to_cell_.push_back(Cell{x, y});
        }
    g.adj_.assign(g.node_to_cell_.size(), {});
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const auto [x, y] = g.node_to_cell_[v];
      // row-major neighbor order gives sorted ids for free, sort anyway
      constexpr int dx[] = {0, -1, 1, 0};
      constexpr int dy[] = {-1, 0, 0, 1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
        const int u = g.cell_to_node_[ny * width + nx];
        if (u >= 0) g.adj_[v].push_back(u);
      }
      std::sort(g.adj_[v].begin(), g.adj_[v].end());
    }
    return g;
  }

  int node_count() const { return static_cast<int>(adj_.size()); }
  const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }
  int degree(NodeId v) const { return static_cast<int>(adj_[v].size()); }

  bool is_grid() const { return width_ > 0; }
  int width() const { return width_; }
  int height() const { return height_; }
  Cell cell(NodeId v) const { return node_to_cell_[v]; }

  // -1 when out of bounds or blocked
  NodeId node_at(int x, int y) const {
    if (!is_grid() || x < 0 || y < 0 || x >= width_ || y >= height_) return -1;
    return cell_to_node_[y * width_ + x];
  }

  // exact shortest-path distance; tables are built once per goal and retained
  int dist(NodeId u, NodeId v) const { return distance_table(v).dist[u]; }

  const DistanceTable& distance_table(NodeId goal) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = dist_cache_.find(goal);
    if (it == dist_cache_.end())
      it = dist_cache_.emplace(goal, std::make_unique<DistanceTable>(bfs_from(goal))).first;
    return *it->second;
  }

  DistanceTable bfs_from(NodeId goal) const {
    DistanceTable table;
    table.goal = goal;
    table.dist.assign(node_count(), kUnreachable);
    table.dist[goal] = 0;
    std::queue<NodeId> q;
    q.push(goal);
    while (!q.empty()) {
      const NodeId v = q.front();
      q.pop();
      for (const NodeId u : adj_[v])
        if (table.dist[u] == kUnreachable) {
          table.dist[u] = table.dist[v] + 1;
          q.push(u);
        }
    }
    return table;
  }

 private:
  std::vector<std::vector<NodeId>> adj_;
  int width_ = 0, height_ = 0;
  std::vector<int> cell_to_node_;  // grid only
  std::vector<Cell> node_to_cell_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<NodeId, std::unique_ptr<DistanceTable>> dist_cache_;
};

// MovingAI .map format: four header lines (type/height/width/map), then
// height rows of width glyphs. '.' and 'G' are passable; '@', 'O', 'T', 'S',
// 'W' are blocked; anything else is a parse error. See docs/formats.md.
inline Graph parse_map(std::istream& in) {
  auto fail = [](int line, const std::string& msg) {
    throw ParseError("map line " + std::to_string(line) + ": " + msg);
  };
  std::string line;
  int line_no = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) fail(line_no + 1, std::string("missing ") + what);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("type header");
  if (line.rfind("type", 0) != 0) fail(line_no, "expected 'type ...'");
  int height = 0, width = 0;
  next_line("height header");
  if (std::sscanf(line.c_str(), "height %d", &height) != 1 || height <= 0)
    fail(line_no, "expected 'height H'");
  next_line("width header");
  if (std::sscanf(line.c_str(), "width %d", &width) != 1 || width <= 0)
    fail(line_no, "expected 'width W'");
  next_line("map header");
  if (line != "map") fail(line_no, "expected 'map'");

  std::vector<char> passable(width * height, 0);
  for (int y = 0; y < height; ++y) {
    next_line("map row");
    if (static_cast<int>(line.size()) != width)
      fail(line_no, "row length " + std::to_string(line.size()) + " != width " + std::to_string(width));
    for (int x = 0; x < width; ++x) {
      switch (line[x]) {
        case '.':
        case 'G':
          passable[y * width + x] = 1;
          break;
        case '@':
        case 'O':
        case 'T':
        case 'S':
        case 'W':
          break;
        default:
          fail(line_no, std::string("unknown glyph '") + line[x] + "'");
      }
    }
  }
  return Graph::from_grid(width, height, passable);
}

inline Graph parse_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open map file: " + path);
  return parse_map(in);
}

}  // namespace mapf
