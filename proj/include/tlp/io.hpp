#pragma once

#include <string>
#include <vector>

#include "tlp/graph.hpp"
#include "tlp/matrix.hpp"

namespace tlp {

// Column layout of an edge-list file (0-based positions). weight = -1 means
// the file carries no weight column.
struct ColumnSchema {
  int src = 0;
  int dst = 1;
  int weight = 2;
  int time = 3;

  static ColumnSchema unweighted() { return {0, 1, -1, 2}; }
  // comma list such as "src,dst,weight,time" or "src,dst,time"
  static ColumnSchema from_string(const std::string& s);
};

// Whitespace- or comma-separated `src dst [weight] time` lines, `#` comments.
// Node ids become dense indices in first-seen order; events are sorted stably
// by timestamp; duplicate (src,dst,t) lines stay distinct events.
EventStream load_edge_list(const std::string& path, const ColumnSchema& schema, bool weighted);

void write_edge_list(const EventStream& stream, const std::string& path, bool weighted);

// Two-column CSV `index,label`.
void write_node_table_csv(const NodeTable& nodes, const std::string& path);

// CSV of doubles, one row per node.
DenseMat load_matrix_csv(const std::string& path);
void write_matrix_csv(const DenseMat& m, const std::string& path);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace tlp
