#include <fmt/format.h>

#include <algorithm>

#include "json_util.hpp"
#include "scriptmind/sequence.hpp"

namespace scriptmind {

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::vector<IntentCode> distinct_nodes(std::span<const SrCell> cells) {
  std::vector<IntentCode> nodes;
  for (const auto& c : cells) {
    nodes.push_back(c.from);
    nodes.push_back(c.to);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace

std::string export_network(std::span<const SrCell> cells, NetworkFormat format) {
  const auto nodes = distinct_nodes(cells);
  if (format == NetworkFormat::dot) {
    std::string out = "digraph transitions {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (const auto& n : nodes) {
      const auto id = format_code(n);
      out += fmt::format("  \"{}\" [label=\"{}\"", id, id);
      if (!n.description.empty()) out += fmt::format(", tooltip=\"{}\"", dot_escape(n.description));
      out += "];\n";
    }
    for (const auto& c : cells) {
      out += fmt::format("  \"{}\" -> \"{}\" [label=\"n={} sr={:.2f}\", count={}, sr={}];\n",
                         format_code(c.from), format_code(c.to), c.observed, c.sr, c.observed,
                         detail::format_double(c.sr));
    }
    out += "}\n";
    return out;
  }

  detail::ordered_json doc;
  auto& jn = doc["nodes"] = detail::ordered_json::array();
  for (const auto& n : nodes) {
    jn.push_back({{"id", format_code(n)}, {"stage", n.stage}, {"step", n.step}, {"description", n.description}});
  }
  auto& je = doc["edges"] = detail::ordered_json::array();
  for (const auto& c : cells) {
    je.push_back({{"from", format_code(c.from)},
                  {"to", format_code(c.to)},
                  {"count", c.observed},
                  {"expected", c.expected},
                  {"sr", c.sr}});
  }
  return doc.dump(2) + "\n";
}

std::string export_sr_csv(std::span<const SrCell> cells) {
  std::string out = "from,to,count,expected,sr\n";
  for (const auto& c : cells) {
    out += fmt::format("{},{},{},{},{}\n", format_code(c.from), format_code(c.to), c.observed,
                       detail::format_double(c.expected), detail::format_double(c.sr));
  }
  return out;
}

}  // namespace scriptmind
