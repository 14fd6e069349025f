#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hattree/builders.hpp"
#include "hattree/errors.hpp"
#include "hattree/weighted_graph.hpp"

namespace hattree {

// Edge-list text format:
//   p wgraph <n> <m>
//   v <id> <pi>          (n lines, ids 0-based)
//   e <u> <v> <w>        (m lines)
// '#' starts a comment line. Decimal weights, shortest round-trip form.

namespace detail {

inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view tok, int line, const char* what) {
  double out = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(line) + ": bad " + what + " '" +
                    std::string(tok) + "'");
  return out;
}

inline std::int64_t parse_int(std::string_view tok, int line, const char* what) {
  std::int64_t out = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(line) + ": bad " + what + " '" +
                    std::string(tok) + "'");
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

inline std::string write_edgelist(const WeightedGraph& g) {
  std::string out;
  out += "p wgraph " + std::to_string(g.vertex_count()) + " " +
         std::to_string(g.edge_count()) + "\n";
  for (int v = 0; v < g.vertex_count(); ++v)
    out += "v " + std::to_string(v) + " " + detail::format_double(g.vertex_weight(v)) +
           "\n";
  for (const auto& e : g.edges())
    out += "e " + std::to_string(e.u) + " " + std::to_string(e.v) + " " +
           detail::format_double(e.w) + "\n";
  return out;
}

inline WeightedGraph read_edgelist(std::string_view text) {
  std::int64_t n = -1, m = -1;
  std::vector<double> pi;
  std::vector<char> seen;
  std::vector<Edge> edges;
  std::int64_t got_v = 0, got_e = 0;
  int line_no = 0;
  std::size_t pos = 0;
  int last_line = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos
                                                 ? text.size() - pos
                                                 : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto toks = detail::split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    last_line = line_no;
    if (toks[0] == "p") {
      if (n >= 0)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": duplicate header");
      if (toks.size() != 4 || toks[1] != "wgraph")
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": expected 'p wgraph <n> <m>'");
      n = detail::parse_int(toks[2], line_no, "vertex count");
      m = detail::parse_int(toks[3], line_no, "edge count");
      if (n < 0 || m < 0 || n > kDefaultVertexCapacity)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": counts out of range");
      pi.assign(static_cast<std::size_t>(n), 0.0);
      seen.assign(static_cast<std::size_t>(n), 0);
    } else if (toks[0] == "v") {
      if (n < 0)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": 'v' before header");
      if (toks.size() != 3)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": expected 'v <id> <pi>'");
      std::int64_t id = detail::parse_int(toks[1], line_no, "vertex id");
      if (id < 0 || id >= n)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": vertex id out of range");
      if (seen[static_cast<std::size_t>(id)])
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": duplicate vertex " +
                        std::string(toks[1]));
      seen[static_cast<std::size_t>(id)] = 1;
      pi[static_cast<std::size_t>(id)] = detail::parse_double(toks[2], line_no, "mass");
      ++got_v;
    } else if (toks[0] == "e") {
      if (n < 0)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": 'e' before header");
      if (toks.size() != 4)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": expected 'e <u> <v> <w>'");
      std::int64_t u = detail::parse_int(toks[1], line_no, "endpoint");
      std::int64_t v = detail::parse_int(toks[2], line_no, "endpoint");
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": endpoint out of range");
      edges.push_back({static_cast<int>(u), static_cast<int>(v),
                       detail::parse_double(toks[3], line_no, "weight")});
      ++got_e;
    } else {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) +
                                              ": unknown record '" +
                                              std::string(toks[0]) + "'");
    }
  }
  if (n < 0) throw Error(ErrorCode::parse_error, "line 1: missing 'p wgraph' header");
  if (got_v != n)
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(last_line) + ": got " + std::to_string(got_v) +
                    " of " + std::to_string(n) + " vertex lines");
  if (got_e != m)
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(last_line) + ": got " + std::to_string(got_e) +
                    " of " + std::to_string(m) + " edge lines");
  try {
    return WeightedGraph(static_cast<int>(n), std::move(pi), std::move(edges));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

inline nlohmann::json graph_json(const WeightedGraph& g, const HatTree* t = nullptr) {
  nlohmann::json j;
  j["n"] = g.vertex_count();
  auto verts = nlohmann::json::array();
  for (int v = 0; v < g.vertex_count(); ++v) {
    nlohmann::json jv{{"id", v}, {"pi", g.vertex_weight(v)}};
    if (t) jv["level"] = t->level(v);
    verts.push_back(std::move(jv));
  }
  j["vertices"] = std::move(verts);
  auto es = nlohmann::json::array();
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    nlohmann::json je{{"u", e.u}, {"v", e.v}, {"w", e.w}};
    if (t)
      je["kind"] = t->edge_kind(static_cast<int>(i)) == EdgeKind::tree ? "tree" : "path";
    es.push_back(std::move(je));
  }
  j["edges"] = std::move(es);
  if (t)
    j["meta"] = {{"h", t->height()}, {"k", t->subdivision()}, {"root", t->root()}};
  return j;
}

inline nlohmann::json hat_tree_json(const HatTree& t) { return graph_json(t.graph(), &t); }

inline WeightedGraph graph_from_json(const nlohmann::json& j) {
  try {
    int n = j.at("n").get<int>();
    std::vector<double> pi(n, 0.0);
    std::vector<char> seen(n, 0);
    for (const auto& jv : j.at("vertices")) {
      int id = jv.at("id").get<int>();
      if (id < 0 || id >= n || seen[id])
        throw Error(ErrorCode::parse_error, "bad or duplicate vertex id in json");
      seen[id] = 1;
      pi[id] = jv.at("pi").get<double>();
    }
    std::vector<Edge> edges;
    for (const auto& je : j.at("edges"))
      edges.push_back({je.at("u").get<int>(), je.at("v").get<int>(),
                       je.at("w").get<double>()});
    return WeightedGraph(n, std::move(pi), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

inline HatTree hat_tree_from_json(const nlohmann::json& j) {
  WeightedGraph g = graph_from_json(j);
  try {
    const auto& meta = j.at("meta");
    std::vector<int> levels(g.vertex_count(), -1);
    for (const auto& jv : j.at("vertices"))
      levels[jv.at("id").get<int>()] = jv.at("level").get<int>();
    HatTree t(std::move(g), meta.at("h").get<int>(), meta.at("k").get<int>(),
              std::move(levels), true);
    t.validate();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

inline std::string write_dot(const WeightedGraph& g, const HatTree* t = nullptr) {
  std::string out = "graph wgraph {\n";
  for (int v = 0; v < g.vertex_count(); ++v) {
    out += "  " + std::to_string(v) + " [pi=" + detail::format_double(g.vertex_weight(v));
    if (t) out += ", level=" + std::to_string(t->level(v));
    out += "];\n";
  }
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    out += "  " + std::to_string(e.u) + " -- " + std::to_string(e.v) +
           " [w=" + detail::format_double(e.w);
    if (t)
      out += std::string(", kind=") +
             (t->edge_kind(static_cast<int>(i)) == EdgeKind::tree ? "tree" : "path");
    out += "];\n";
  }
  out += "}\n";
  return out;
}

/// Reads a graph from edge-list or JSON text (detected by a leading '{').
inline WeightedGraph read_graph(std::string_view text) {
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (c == '{') {
      try {
        return graph_from_json(nlohmann::json::parse(text));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, e.what());
      }
    }
    break;
  }
  return read_edgelist(text);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path + "'");
}

}  // namespace hattree
