#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "itn/country.hpp"
#include "itn/error.hpp"
#include "itn/io/csv.hpp"
#include "itn/mst.hpp"
#include "itn/network.hpp"

namespace itn::io {

/// Round-trip safe decimal form.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

enum class GraphFormat { dot, graphml, csv };

inline GraphFormat parse_graph_format(const std::string& s) {
  if (s == "dot") return GraphFormat::dot;
  if (s == "graphml") return GraphFormat::graphml;
  if (s == "csv") return GraphFormat::csv;
  throw InvalidArgument("unsupported graph format '" + s + "' (expected dot, graphml or csv)");
}

struct GraphEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;
  double distance = std::numeric_limits<double>::quiet_NaN();  // trees only
};

struct Graph {
  std::string kind;  // original, residual, mst
  std::vector<GraphEdge> edges;
};

inline Graph graph_of(const WeightedNetwork& net) {
  Graph g{std::string(to_string(net.kind())), {}};
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      if (net(i, j) > 0.0) g.edges.push_back({i, j, net(i, j)});
  return g;
}

/// Tree edges keep their report weight even when it is 0 (the longest edge).
inline Graph graph_of(const SpanningTree& tree) {
  Graph g{"mst", {}};
  for (const auto& e : tree.edges) g.edges.push_back({e.i, e.j, e.report_weight, e.distance});
  std::sort(g.edges.begin(), g.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return g;
}

/// Keeps the ceil(fraction * m) heaviest of m edges; ties go to the lower index pair.
inline Graph top_fraction(Graph g, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("top_fraction must lie in (0,1]");
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(g.edges.size()) - 1e-9));
  std::stable_sort(g.edges.begin(), g.edges.end(),
                   [](const GraphEdge& a, const GraphEdge& b) { return a.weight > b.weight; });
  g.edges.resize(std::min(keep, g.edges.size()));
  std::sort(g.edges.begin(), g.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return g;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string node_label(const Country& c) { return c.acronym.empty() ? std::to_string(c.id) : c.acronym; }

}  // namespace detail

inline void write_graph(std::ostream& os, const Graph& g, const CountryTable& countries, GraphFormat format) {
  for (const auto& e : g.edges)
    if (e.i >= countries.size() || e.j >= countries.size()) throw InvalidArgument("write_graph: edge outside the country table");
  const bool tree = g.kind == "mst";
  switch (format) {
    case GraphFormat::csv:
      os << "source_id,target_id,source,target,weight_" << g.kind;
      if (tree) os << ",distance_mst";
      os << '\n';
      for (const auto& e : g.edges) {
        os << countries[e.i].id << ',' << countries[e.j].id << ',' << csv_field(detail::node_label(countries[e.i])) << ','
           << csv_field(detail::node_label(countries[e.j])) << ',' << num(e.weight);
        if (tree) os << ',' << num(e.distance);
        os << '\n';
      }
      break;
    case GraphFormat::dot:
      os << "graph itn_" << g.kind << " {\n";
      for (const auto& c : countries)
        os << "  \"" << detail::node_label(c) << "\" [gdp=" << num(c.gdp) << ", continent=\"" << c.continent << "\"];\n";
      for (const auto& e : g.edges)
        os << "  \"" << detail::node_label(countries[e.i]) << "\" -- \"" << detail::node_label(countries[e.j])
           << "\" [weight=" << num(e.weight) << ", penwidth=" << num(0.5 + 4.5 * e.weight) << "];\n";
      os << "}\n";
      break;
    case GraphFormat::graphml:
      os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
            "  <key id=\"gdp\" for=\"node\" attr.name=\"gdp\" attr.type=\"double\"/>\n"
            "  <key id=\"continent\" for=\"node\" attr.name=\"continent\" attr.type=\"string\"/>\n"
            "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
            "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
      if (tree) os << "  <key id=\"distance\" for=\"edge\" attr.name=\"distance\" attr.type=\"double\"/>\n";
      os << "  <graph id=\"" << g.kind << "\" edgedefault=\"undirected\">\n";
      for (const auto& c : countries)
        os << "    <node id=\"n" << c.id << "\"><data key=\"gdp\">" << num(c.gdp) << "</data><data key=\"continent\">"
           << detail::xml_escape(c.continent) << "</data><data key=\"name\">" << detail::xml_escape(detail::node_label(c))
           << "</data></node>\n";
      for (const auto& e : g.edges) {
        os << "    <edge source=\"n" << countries[e.i].id << "\" target=\"n" << countries[e.j].id
           << "\"><data key=\"weight\">" << num(e.weight) << "</data>";
        if (tree) os << "<data key=\"distance\">" << num(e.distance) << "</data>";
        os << "</edge>\n";
      }
      os << "  </graph>\n</graphml>\n";
      break;
  }
}

/// Reads an edge-list CSV written by write_graph back into a symmetric matrix.
inline Matrix read_edge_list(const CsvTable& t, const CountryTable& countries) {
  const auto c_s = t.require("source_id"), c_t = t.require("target_id");
  std::optional<std::size_t> c_w;
  for (std::size_t k = 0; k < t.header.size(); ++k)
    if (t.header[k].rfind("weight_", 0) == 0) c_w = k;
  if (!c_w) throw ParseError(t.path, 1, "missing weight column");
  const auto n = static_cast<Eigen::Index>(countries.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(detail::country_index(countries, t, r, c_s));
    const auto j = static_cast<Eigen::Index>(detail::country_index(countries, t, r, c_t));
    if (i == j) throw ParseError(t.path, t.lines[r], "self loop");
    if (m(i, j) != 0.0) throw ParseError(t.path, t.lines[r], "duplicate edge");
    m(i, j) = m(j, i) = detail::parse_double(t, r, *c_w);
  }
  return m;
}

}  // namespace itn::io
