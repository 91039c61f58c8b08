#include "fairmap/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fairmap/errors.hpp"
#include "fairmap/io_util.hpp"
#include "json.hpp"

namespace fairmap {

using nlohmann::json;

namespace {

constexpr std::string_view kGraphFormat = "fairmap.graph/1";

double position_for(double mean, double lo, double hi, ColorScale scale) {
  if (scale == ColorScale::kPinned) return std::clamp((mean + 1.0) / 2.0, 0.0, 1.0);
  if (!(hi > lo)) return 0.5;
  return std::clamp((mean - lo) / (hi - lo), 0.0, 1.0);
}

std::string node_label(std::size_t id, std::size_t size) {
  return std::to_string(id) + " (" + std::to_string(size) + ")";
}

std::string escape_dot(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n' || c == '\r') {
      out += ' ';
      continue;
    }
    out += c;
  }
  return out;
}

std::string escape_html(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Rgb parse_hex(const std::string& s) {
  if (s.size() != 7 || s[0] != '#') throw ParseError("bad color '" + s + "'");
  auto byte = [&s](std::size_t at) {
    return static_cast<std::uint8_t>(std::stoi(s.substr(at, 2), nullptr, 16));
  };
  try {
    return {byte(1), byte(3), byte(5)};
  } catch (const std::exception&) {
    throw ParseError("bad color '" + s + "'");
  }
}

}  // namespace

std::string Rgb::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "#";
  for (std::uint8_t c : {r, g, b}) {
    out += kHex[c >> 4];
    out += kHex[c & 0xF];
  }
  return out;
}

ColorMap::ColorMap(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.size() < 2) throw InvalidArgumentError("colormap needs at least two anchors");
  if (anchors_.front().position != 0.0 || anchors_.back().position != 1.0) {
    throw InvalidArgumentError("colormap anchors must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < anchors_.size(); ++i) {
    if (!(anchors_[i - 1].position < anchors_[i].position)) {
      throw InvalidArgumentError("colormap anchor positions must be strictly increasing");
    }
  }
}

ColorMap ColorMap::heat() {
  return ColorMap({{0.00, {48, 0, 72}},
                   {0.25, {72, 40, 150}},
                   {0.50, {50, 100, 170}},
                   {0.75, {40, 170, 130}},
                   {1.00, {253, 231, 37}}});
}

std::array<double, 3> ColorMap::interpolate(double t) const noexcept {
  t = std::clamp(t, 0.0, 1.0);
  std::size_t hi = 1;
  while (hi + 1 < anchors_.size() && anchors_[hi].position < t) ++hi;
  const Anchor& a = anchors_[hi - 1];
  const Anchor& b = anchors_[hi];
  const double f = (t - a.position) / (b.position - a.position);
  std::array<double, 3> out{};
  for (std::size_t c = 0; c < 3; ++c) out[c] = a.rgb[c] + f * (b.rgb[c] - a.rgb[c]);
  return out;
}

Rgb ColorMap::color(double t) const noexcept {
  const auto c = interpolate(t);
  auto q = [](double x) { return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L)); };
  return {q(c[0]), q(c[1]), q(c[2])};
}

void recolor(RenderedGraph& graph, const ColorMap& cmap, ColorScale scale) {
  double lo = 0.0;
  double hi = 0.0;
  if (!graph.nodes.empty()) {
    const auto [mn, mx] = std::minmax_element(graph.nodes.begin(), graph.nodes.end(),
                                              [](const auto& a, const auto& b) { return a.mean_lens < b.mean_lens; });
    lo = mn->mean_lens;
    hi = mx->mean_lens;
  }
  for (auto& n : graph.nodes) {
    n.color_position = position_for(n.mean_lens, lo, hi, scale);
    n.color = cmap.color(n.color_position);
  }
  graph.metadata["render.color_scale"] = scale == ColorScale::kPinned ? "pinned" : "observed";
}

RenderedGraph colorize(const SimplicialComplex& complex, const LensValues& lens, const ColorMap& cmap,
                       ColorScale scale) {
  SimplicialComplex with_means = complex;
  attach_mean_lens(with_means, lens);
  RenderedGraph g;
  g.max_dim = complex.max_dim;
  for (const auto& node : with_means.nodes) {
    RenderedNode rn;
    rn.node_id = node.node_id;
    rn.interval_index = node.interval_index;
    rn.cluster_index = node.cluster_index;
    rn.label = node_label(node.node_id, node.size());
    rn.radius = kRadiusScale * std::sqrt(static_cast<double>(node.size()));
    rn.mean_lens = node.mean_lens;
    rn.members = node.members;
    g.nodes.push_back(std::move(rn));
  }
  for (const auto& e : complex.edges()) g.edges.push_back({e.vertices[0], e.vertices[1], e.weight});
  for (std::size_t k = 1; k < complex.simplices.size(); ++k) {
    g.higher_simplices.insert(g.higher_simplices.end(), complex.simplices[k].begin(), complex.simplices[k].end());
  }
  recolor(g, cmap, scale);
  return g;
}

SimplicialComplex to_complex(const RenderedGraph& graph) {
  SimplicialComplex c;
  c.max_dim = graph.max_dim;
  c.simplices.resize(std::max<std::size_t>(1, graph.max_dim));
  for (const auto& n : graph.nodes) {
    MapperNode m;
    m.node_id = n.node_id;
    m.interval_index = n.interval_index;
    m.cluster_index = n.cluster_index;
    m.members = n.members;
    m.mean_lens = n.mean_lens;
    c.nodes.push_back(std::move(m));
  }
  for (const auto& e : graph.edges) c.simplices[0].push_back({{e.u, e.v}, e.weight});
  for (const auto& s : graph.higher_simplices) {
    const std::size_t dim = s.vertices.size() - 1;
    if (dim >= c.simplices.size()) c.simplices.resize(dim);
    c.simplices[dim - 1].push_back(s);
  }
  return c;
}

std::string to_dot(const RenderedGraph& graph) {
  std::string out = "// fairmap mapper graph\n";
  for (const auto& [k, v] : graph.metadata) out += "// " + escape_dot(k) + ": " + escape_dot(v) + "\n";
  out += "graph mapper {\n";
  out += "  node [shape=circle, style=filled, fixedsize=true, fontsize=10];\n";
  for (const auto& n : graph.nodes) {
    out += "  " + std::to_string(n.node_id) + " [label=\"" + escape_dot(n.label) +
           "\", width=" + format_double(n.radius) + ", fillcolor=\"" + n.color.hex() + "\"];\n";
  }
  for (const auto& e : graph.edges) {
    out += "  " + std::to_string(e.u) + " -- " + std::to_string(e.v) + " [weight=" + std::to_string(e.weight) +
           "];\n";
  }
  out += "}\n";
  return out;
}

std::string to_graph_file(const RenderedGraph& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes) {
    nodes.push_back({{"id", n.node_id},
                     {"interval", n.interval_index},
                     {"cluster", n.cluster_index},
                     {"label", n.label},
                     {"size", n.size()},
                     {"radius", n.radius},
                     {"mean_lens", n.mean_lens},
                     {"color", n.color.hex()},
                     {"color_position", n.color_position},
                     {"members", n.members}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges) edges.push_back({{"u", e.u}, {"v", e.v}, {"weight", e.weight}});
  json simplices = json::array();
  for (const auto& s : graph.higher_simplices) {
    simplices.push_back({{"dim", s.vertices.size() - 1}, {"vertices", s.vertices}, {"weight", s.weight}});
  }
  const json doc{{"format", kGraphFormat}, {"max_dim", graph.max_dim}, {"metadata", graph.metadata},
                 {"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"simplices", std::move(simplices)}};
  return doc.dump(1) + "\n";
}

RenderedGraph parse_graph_file(std::string_view text) {
  RenderedGraph g;
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kGraphFormat) throw ParseError("unsupported graph format");
    g.max_dim = doc.at("max_dim").get<std::size_t>();
    if (g.max_dim < 1 || g.max_dim > kMaxNerveDim) throw ParseError("graph max_dim out of range");
    g.metadata = doc.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& n : doc.at("nodes")) {
      RenderedNode rn;
      rn.node_id = n.at("id").get<std::size_t>();
      rn.interval_index = n.at("interval").get<std::size_t>();
      rn.cluster_index = n.at("cluster").get<std::size_t>();
      rn.label = n.at("label").get<std::string>();
      rn.radius = n.at("radius").get<double>();
      rn.mean_lens = n.at("mean_lens").get<double>();
      rn.color = parse_hex(n.at("color").get<std::string>());
      rn.color_position = n.at("color_position").get<double>();
      rn.members = n.at("members").get<std::vector<std::string>>();
      if (rn.node_id != g.nodes.size()) throw ParseError("node ids must be dense and ascending");
      if (rn.members.empty() || n.at("size").get<std::size_t>() != rn.members.size()) {
        throw ParseError("node " + std::to_string(rn.node_id) + " size does not match its members");
      }
      g.nodes.push_back(std::move(rn));
    }
    for (const auto& e : doc.at("edges")) {
      RenderedEdge re{e.at("u").get<std::size_t>(), e.at("v").get<std::size_t>(), e.at("weight").get<std::size_t>()};
      if (re.u >= re.v || re.v >= g.nodes.size()) throw ParseError("edge endpoints out of range");
      g.edges.push_back(re);
    }
    for (const auto& s : doc.at("simplices")) {
      Simplex sx{s.at("vertices").get<std::vector<std::size_t>>(), s.at("weight").get<std::size_t>()};
      if (sx.vertices.size() < 3 || sx.vertices.size() - 1 > g.max_dim ||
          s.at("dim").get<std::size_t>() != sx.vertices.size() - 1) {
        throw ParseError("simplex dimension out of range");
      }
      for (std::size_t v : sx.vertices) {
        if (v >= g.nodes.size()) throw ParseError("simplex vertex out of range");
      }
      g.higher_simplices.push_back(std::move(sx));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed graph file: ") + e.what());
  }
  return g;
}

std::string to_html_report(const RenderedGraph& graph, const ColorMap& cmap) {
  constexpr double kWidth = 900.0;
  constexpr double kHeight = 640.0;
  const double cx = kWidth / 2.0;
  const double cy = kHeight / 2.0;
  const double ring = 0.38 * std::min(kWidth, kHeight);
  const std::size_t v = graph.nodes.size();

  std::vector<std::pair<double, double>> pos(v);
  for (std::size_t i = 0; i < v; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(v, 1));
    pos[i] = {std::round(cx + ring * std::cos(a)), std::round(cy + ring * std::sin(a))};
  }

  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>fairmap graph</title>\n";
  out += "<style>body{font-family:sans-serif;margin:16px}svg{border:1px solid #ccc}"
         ".legend{display:flex;align-items:center;gap:8px;margin-top:8px}"
         ".bar{width:320px;height:14px}table{border-collapse:collapse;font-size:12px}"
         "td{padding:1px 8px}</style>\n</head>\n<body>\n";
  out += "<h1>Mapper graph</h1>\n";
  out += "<p>" + std::to_string(v) + " nodes, " + std::to_string(graph.edges.size()) + " edges</p>\n";

  out += "<svg id=\"graph\" width=\"" + format_double(kWidth) + "\" height=\"" + format_double(kHeight) +
         "\" viewBox=\"0 0 " + format_double(kWidth) + " " + format_double(kHeight) + "\">\n";
  for (const auto& e : graph.edges) {
    out += "<line class=\"edge\" data-u=\"" + std::to_string(e.u) + "\" data-v=\"" + std::to_string(e.v) +
           "\" x1=\"" + format_double(pos[e.u].first) + "\" y1=\"" + format_double(pos[e.u].second) +
           "\" x2=\"" + format_double(pos[e.v].first) + "\" y2=\"" + format_double(pos[e.v].second) +
           "\" stroke=\"#888\" stroke-width=\"" + std::to_string(1 + std::min<std::size_t>(e.weight, 6)) +
           "\"/>\n";
  }
  for (const auto& n : graph.nodes) {
    out += "<circle class=\"node\" data-id=\"" + std::to_string(n.node_id) + "\" cx=\"" +
           format_double(pos[n.node_id].first) + "\" cy=\"" + format_double(pos[n.node_id].second) +
           "\" r=\"" + format_double(std::round(40.0 * n.radius * 10.0) / 10.0) + "\" fill=\"" + n.color.hex() +
           "\"><title>" + escape_html(n.label) + " mean lens " + format_double(n.mean_lens) +
           "</title></circle>\n";
  }
  out += "</svg>\n";

  std::string stops;
  for (const auto& a : cmap.anchors()) {
    const Rgb c = cmap.color(a.position);
    stops += ", " + c.hex() + " " + format_double(a.position * 100.0) + "%";
  }
  double lo = 0.0;
  double hi = 0.0;
  if (!graph.nodes.empty()) {
    lo = hi = graph.nodes.front().mean_lens;
    for (const auto& n : graph.nodes) {
      lo = std::min(lo, n.mean_lens);
      hi = std::max(hi, n.mean_lens);
    }
  }
  const bool pinned = graph.metadata.contains("render.color_scale") &&
                      graph.metadata.at("render.color_scale") == "pinned";
  out += "<div class=\"legend\"><span>unfair " + format_double(pinned ? -1.0 : lo) +
         "</span><div class=\"bar\" style=\"background:linear-gradient(to right" + stops +
         ")\"></div><span>" + format_double(pinned ? 1.0 : hi) + " fair</span></div>\n";

  out += "<h2>Run parameters</h2>\n<table>\n";
  for (const auto& [k, val] : graph.metadata) {
    out += "<tr><td>" + escape_html(k) + "</td><td>" + escape_html(val) + "</td></tr>\n";
  }
  out += "</table>\n";

  out += R"JS(<script>
(function () {
  var svg = document.getElementById('graph');
  var circles = Array.prototype.slice.call(svg.querySelectorAll('circle'));
  var lines = Array.prototype.slice.call(svg.querySelectorAll('line'));
  var W = svg.viewBox.baseVal.width, H = svg.viewBox.baseVal.height;
  var pts = circles.map(function (c) {
    return {x: +c.getAttribute('cx'), y: +c.getAttribute('cy'), vx: 0, vy: 0};
  });
  var links = lines.map(function (l) { return [+l.dataset.u, +l.dataset.v]; });
  var ticks = 0;
  function step() {
    var i, j, n = pts.length;
    for (i = 0; i < n; i++) {
      for (j = i + 1; j < n; j++) {
        var dx = pts[j].x - pts[i].x, dy = pts[j].y - pts[i].y;
        var d2 = dx * dx + dy * dy + 0.01, f = 900 / d2;
        pts[i].vx -= f * dx; pts[i].vy -= f * dy;
        pts[j].vx += f * dx; pts[j].vy += f * dy;
      }
    }
    links.forEach(function (e) {
      var a = pts[e[0]], b = pts[e[1]];
      var dx = b.x - a.x, dy = b.y - a.y, d = Math.sqrt(dx * dx + dy * dy) + 1e-6;
      var f = 0.02 * (d - 60) / d;
      a.vx += f * dx; a.vy += f * dy; b.vx -= f * dx; b.vy -= f * dy;
    });
    pts.forEach(function (p) {
      p.vx += 0.002 * (W / 2 - p.x); p.vy += 0.002 * (H / 2 - p.y);
      p.x = Math.max(10, Math.min(W - 10, p.x + 0.5 * p.vx));
      p.y = Math.max(10, Math.min(H - 10, p.y + 0.5 * p.vy));
      p.vx *= 0.6; p.vy *= 0.6;
    });
    circles.forEach(function (c, k) { c.setAttribute('cx', pts[k].x); c.setAttribute('cy', pts[k].y); });
    lines.forEach(function (l, k) {
      var e = links[k];
      l.setAttribute('x1', pts[e[0]].x); l.setAttribute('y1', pts[e[0]].y);
      l.setAttribute('x2', pts[e[1]].x); l.setAttribute('y2', pts[e[1]].y);
    });
    if (++ticks < 300) window.requestAnimationFrame(step);
  }
  window.requestAnimationFrame(step);
})();
</script>
</body>
</html>
)JS";
  return out;
}

}  // namespace fairmap
