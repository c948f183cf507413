#include "tlp/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tlp/error.hpp"

namespace tlp {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double parse_num(const std::string& tok, int line_no, const char* what) {
  double v;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line_no) + ": invalid " + what + " '" + tok + "'");
  return v;
}

}  // namespace

ColumnSchema ColumnSchema::from_string(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) parts.push_back(cur);
  ColumnSchema cs{-1, -1, -1, -1};
  for (int pos = 0; pos < int(parts.size()); ++pos) {
    const auto& p = parts[pos];
    if (p == "src") cs.src = pos;
    else if (p == "dst") cs.dst = pos;
    else if (p == "weight") cs.weight = pos;
    else if (p == "time") cs.time = pos;
    else throw ValidationError("schema: unknown column '" + p + "'");
  }
  if (cs.src < 0 || cs.dst < 0 || cs.time < 0)
    throw ValidationError("schema must name src, dst and time columns");
  return cs;
}

EventStream load_edge_list(const std::string& path, const ColumnSchema& schema, bool weighted) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  if (weighted && schema.weight < 0)
    throw ValidationError("weighted load requested but schema has no weight column");

  const int need = 1 + std::max({schema.src, schema.dst, schema.time,
                                 weighted ? schema.weight : -1});
  EventStream stream;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (int(toks.size()) < need)
      throw ParseError("line " + std::to_string(line_no) + ": expected at least " +
                       std::to_string(need) + " columns, got " + std::to_string(toks.size()));
    Event ev;
    ev.src = stream.nodes.add(toks[schema.src]);
    ev.dst = stream.nodes.add(toks[schema.dst]);
    ev.weight = weighted ? parse_num(toks[schema.weight], line_no, "weight") : 1.0;
    ev.time = parse_num(toks[schema.time], line_no, "timestamp");
    if (ev.weight < 0.0)
      throw ValidationError("line " + std::to_string(line_no) + ": negative weight");
    if (ev.time < 0.0)
      throw ValidationError("line " + std::to_string(line_no) + ": negative timestamp");
    if (ev.weight == 0.0) continue;       // absence encodes zero
    if (ev.src == ev.dst) continue;       // self-loops dropped on ingestion
    stream.events.push_back(ev);
  }
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
  return stream;
}

void write_edge_list(const EventStream& stream, const std::string& path, bool weighted) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& ev : stream.events) {
    out << stream.nodes.label(ev.src) << ' ' << stream.nodes.label(ev.dst);
    if (weighted) out << ' ' << format_double(ev.weight);
    out << ' ' << format_double(ev.time) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_node_table_csv(const NodeTable& nodes, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "index,label\n";
  for (int i = 0; i < nodes.n(); ++i)
    out << i << ',' << (nodes.labeled() ? nodes.label(i) : std::to_string(i)) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

DenseMat load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& t : toks) row.push_back(parse_num(t, line_no, "value"));
    if (!rows.empty() && rows.front().size() != row.size())
      throw ParseError("line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  DenseMat m(int(rows.size()), rows.empty() ? 0 : int(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const DenseMat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace tlp
