#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fairmap/nerve.hpp"
#include "fairmap/vectorspace.hpp"

namespace fairmap {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  std::string hex() const;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Piecewise-linear heat map over [0, 1].
class ColorMap {
 public:
  struct Anchor {
    double position;
    std::array<double, 3> rgb;
  };

  // Positions must be strictly increasing from 0 to 1 (InvalidArgumentError).
  explicit ColorMap(std::vector<Anchor> anchors);

  // Dark purple (unfair) through blue-violet to bright yellow (fair).
  static ColorMap heat();

  const std::vector<Anchor>& anchors() const noexcept { return anchors_; }

  // Componentwise linear interpolation between the bracketing anchors; t is
  // clamped to [0, 1].
  std::array<double, 3> interpolate(double t) const noexcept;
  Rgb color(double t) const noexcept;

 private:
  std::vector<Anchor> anchors_;
};

enum class ColorScale {
  kObserved,  // node-mean range mapped to [0, 1]
  kPinned,    // lens range [-1, 1] mapped to [0, 1]
};

struct RenderedNode {
  std::size_t node_id = 0;
  std::size_t interval_index = 0;
  std::size_t cluster_index = 0;
  std::string label;
  double radius = 0.0;
  double color_position = 0.0;
  Rgb color;
  double mean_lens = 0.0;
  std::vector<std::string> members;

  std::size_t size() const noexcept { return members.size(); }
  friend bool operator==(const RenderedNode&, const RenderedNode&) = default;
};

struct RenderedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::size_t weight = 0;

  friend bool operator==(const RenderedEdge&, const RenderedEdge&) = default;
};

struct RenderedGraph {
  std::vector<RenderedNode> nodes;
  std::vector<RenderedEdge> edges;
  std::vector<Simplex> higher_simplices;  // dimension >= 2, by dimension then lexicographic
  std::size_t max_dim = 1;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const RenderedGraph&, const RenderedGraph&) = default;
};

inline constexpr double kRadiusScale = 0.15;

// Recomputes node means from `lens`, then maps each mean to a colormap
// position (see ColorScale; a degenerate range maps to 0.5). Radius is
// kRadiusScale * sqrt(size).
RenderedGraph colorize(const SimplicialComplex& complex, const LensValues& lens, const ColorMap& cmap,
                       ColorScale scale = ColorScale::kObserved);

// Recolors from the stored node means.
void recolor(RenderedGraph& graph, const ColorMap& cmap, ColorScale scale);

// Node structure and simplices, for analysis of a stored graph.
SimplicialComplex to_complex(const RenderedGraph& graph);

// Undirected DOT document. Nodes ascend by id, edges lexicographically, and
// metadata is written as a comment header.
std::string to_dot(const RenderedGraph& graph);

// Canonical JSON graph document ("fairmap.graph/1"); parse_graph_file inverts it.
std::string to_graph_file(const RenderedGraph& graph);
RenderedGraph parse_graph_file(std::string_view text);

// Self-contained static HTML page: one SVG circle per node and one SVG line
// per edge, a heat-map legend, and an inline force-layout script.
std::string to_html_report(const RenderedGraph& graph, const ColorMap& cmap = ColorMap::heat());

}  // namespace fairmap
