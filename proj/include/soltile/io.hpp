#pragma once

// JSON and SVG emitters. Exact rationals are written as "p/q" strings; z-intervals
// of tile boxes are given in units of the row height L.

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hull.hpp"
#include "hypertiling.hpp"
#include "rational.hpp"
#include "soltiling.hpp"

namespace soltile {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Shared pieces

inline Json params_to_json(const SolParams& params) {
  Json j{{"a", params.a()}, {"b", params.b()}};
  j["n"] = params.subdivision() ? Json(*params.subdivision()) : Json(nullptr);
  return j;
}

inline SolParams params_from_json(const Json& j) {
  const SolParams params(j.at("a").get<double>(), j.at("b").get<double>());
  if (j.contains("n") && !j.at("n").is_null()) {
    const int n = j.at("n").get<int>();
    if (params.subdivision() != n) throw ParameterError("params: n inconsistent with (a, b)");
    return SolParams::from_subdivision(n, params.heintze(), params.a());
  }
  return params;
}

inline Json address_to_json(const TileAddress& t) { return Json::array({t.i, t.j, t.k}); }

inline TileAddress address_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ParameterError("tile address must be [i, j, k]");
  return {j[0].get<Index>(), j[1].get<Index>(), j[2].get<Index>()};
}

inline Json interval_to_json(const RationalInterval& iv) {
  return Json::array({to_string(iv.lo), to_string(iv.hi)});
}

inline RationalInterval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParameterError("interval must be [lo, hi]");
  return {parse_rational(j[0].get<std::string>()), parse_rational(j[1].get<std::string>())};
}

// ---------------------------------------------------------------------------
// Decorated patches of the 3D tiling

struct PatchDocument {
  SolParams params;
  DecoratedPatch patch;
};

inline Json patch_to_json(const SolParams& params, const DecoratedPatch& patch) {
  Json tiles = Json::array();
  for (const auto& [tile, label] : patch.tiles) {
    const auto box = exact_tile_box(params, tile);
    tiles.push_back({{"addr", address_to_json(tile)},
                     {"label", label},
                     {"box", Json::array({interval_to_json(box.x), interval_to_json(box.y),
                                          interval_to_json(box.zeta)})}});
  }
  Json adjacency = Json::array();
  for (const auto& adj : patch.adjacency) {
    adjacency.push_back(Json::array({address_to_json(adj.from), address_to_json(adj.to), to_string(adj.face)}));
  }
  return {{"params", params_to_json(params)}, {"center", address_to_json(patch.center)},
          {"radius", patch.radius},           {"z_unit", "L"},
          {"tiles", tiles},                   {"adjacency", adjacency}};
}

inline PatchDocument patch_from_json(const Json& j) {
  PatchDocument doc{params_from_json(j.at("params")), {}};
  doc.patch.center = address_from_json(j.at("center"));
  doc.patch.radius = j.at("radius").get<int>();
  for (const auto& tile : j.at("tiles")) {
    const TileAddress addr = address_from_json(tile.at("addr"));
    const int label = tile.at("label").get<int>();
    if (label != 0 && label != 1) throw ParameterError("patch: labels must be 0 or 1");
    const auto& box = tile.at("box");
    const ExactTileBox parsed{interval_from_json(box.at(0)), interval_from_json(box.at(1)),
                              interval_from_json(box.at(2))};
    if (parsed != exact_tile_box(doc.params, addr)) {
      throw ParameterError("patch: box of tile " + to_string(addr) + " does not match its address");
    }
    doc.patch.tiles.emplace(addr, label);
  }
  for (const auto& adj : j.at("adjacency")) {
    doc.patch.adjacency.push_back({address_from_json(adj.at(0)), address_from_json(adj.at(1)),
                                   parse_face_type(adj.at(2).get<std::string>())});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Half-plane patches

inline Json hyper_patch_to_json(const std::vector<HTileAddress>& tiles, const BiSequence& omega) {
  Json out = Json::array();
  for (const auto& t : tiles) {
    const auto region = h_region_exact(t);
    out.push_back({{"addr", Json::array({t.i, t.j})},
                   {"label", h_decorate(t, omega)},
                   {"region", Json::array({interval_to_json(region.alpha), interval_to_json(region.beta)})}});
  }
  return {{"sequence", omega.name()}, {"tiles", out}};
}

// ---------------------------------------------------------------------------
// Transversal codes and orbit graphs

inline Json code_to_json(const TransversalCode& c) {
  return {{"n", c.n},
          {"u_digits", c.u_digits},
          {"v_digits", c.v_digits},
          {"labels", c.labels},
          {"label_offset", c.label_offset}};
}

inline TransversalCode code_from_json(const Json& j) {
  TransversalCode c;
  c.n = j.at("n").get<int>();
  c.u_digits = j.at("u_digits").get<std::vector<int>>();
  c.v_digits = j.at("v_digits").get<std::vector<int>>();
  c.labels = j.at("labels").get<std::vector<int>>();
  c.label_offset = j.at("label_offset").get<Index>();
  validate(c);
  return c;
}

inline Json orbit_graph_to_json(const OrbitGraph& graph) {
  Json nodes = Json::array();
  for (const auto& c : graph.nodes) nodes.push_back(code_to_json(c));
  Json edges = Json::array();
  for (const auto& e : graph.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"move", to_string(e.move)}});
  return {{"nodes", nodes}, {"edges", edges}};
}

inline OrbitGraph orbit_graph_from_json(const Json& j) {
  OrbitGraph graph;
  for (const auto& node : j.at("nodes")) graph.nodes.push_back(code_from_json(node));
  for (const auto& e : j.at("edges")) {
    const auto from = e.at("from").get<std::size_t>();
    const auto to = e.at("to").get<std::size_t>();
    if (from >= graph.nodes.size() || to >= graph.nodes.size()) throw ParameterError("orbit graph: bad edge");
    graph.edges.push_back({from, to, parse_move(e.at("move").get<std::string>())});
  }
  return graph;
}

inline Json invariant_measure_to_json(const InvariantMeasureReport& report) {
  const auto strings = [](const std::vector<Rational>& values) {
    Json out = Json::array();
    for (const auto& v : values) out.push_back(to_string(v));
    return out;
  };
  Json j{{"n", report.n},
         {"depth", report.depth},
         {"feasible", report.feasible},
         {"verified", report.verified},
         {"cylinders", report.cylinders.size()},
         {"constraints", report.system.rows.size()},
         {"summary", report.summary}};
  if (report.feasible) {
    j["u_marginal"] = strings(report.u_marginal);
    j["v_marginal"] = strings(report.v_marginal);
  } else {
    Json rows = Json::array();
    for (std::size_t r = 0; r < report.certificate.size(); ++r) {
      if (report.certificate[r] != 0) {
        rows.push_back({{"row", report.system.rows[r].label}, {"multiplier", to_string(report.certificate[r])}});
      }
    }
    j["certificate"] = rows;
  }
  return j;
}

/// Full certificate as exact rational text, one multiplier per line.
inline std::string certificate_text(const InvariantMeasureReport& report) {
  std::ostringstream out;
  out << report.summary;
  if (report.feasible) {
    out << "# cylinder masses (u digits, v digits, window)\n";
    for (std::size_t v = 0; v < report.measure.size(); ++v) {
      if (report.measure[v] == 0) continue;
      const auto& c = report.cylinders[v];
      out << to_string(report.measure[v]) << "  u=" << c.alpha << " v=" << c.beta << " w=";
      for (int bit : c.window) out << bit;
      out << '\n';
    }
  } else {
    out << "# multipliers\n";
    for (std::size_t r = 0; r < report.certificate.size(); ++r) {
      if (report.certificate[r] != 0) out << to_string(report.certificate[r]) << "  " << report.system.rows[r].label << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Measure reports

struct MeasureReport {
  std::string case_name;
  double estimate = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  friend bool operator==(const MeasureReport&, const MeasureReport&) = default;
};

inline Json measure_report_to_json(const MeasureReport& r) {
  return {{"case", r.case_name}, {"estimate", r.estimate}, {"reference", r.reference},
          {"tolerance", r.tolerance}, {"pass", r.pass}};
}

inline MeasureReport measure_report_from_json(const Json& j) {
  return {j.at("case").get<std::string>(), j.at("estimate").get<double>(), j.at("reference").get<double>(),
          j.at("tolerance").get<double>(), j.at("pass").get<bool>()};
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

inline const char* label_fill(int label) { return label ? "#4a78b5" : "#e8d9a8"; }

struct SvgCanvas {
  double x0, x1, y0, y1;  // data window, y upward
  double width = 800.0;
  double height = 600.0;
  std::ostringstream body;

  double sx(double x) const { return (x - x0) / (x1 - x0) * width; }
  double sy(double y) const { return height - (y - y0) / (y1 - y0) * height; }

  void rect(double xa, double xb, double ya, double yb, const char* fill, const std::string& title) {
    const double left = sx(std::max(xa, x0));
    const double right = sx(std::min(xb, x1));
    const double top = sy(std::min(yb, y1));
    const double bottom = sy(std::max(ya, y0));
    body << "  <rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left)
         << "\" height=\"" << fmt(bottom - top) << "\" fill=\"" << fill
         << "\" stroke=\"#222\" stroke-width=\"0.6\"><title>" << title << "</title></rect>\n";
  }

  std::string finish(const std::string& caption) const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height + 24) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height + 24) << "\">\n"
        << body.str() << "  <text x=\"4\" y=\"" << fmt(height + 18) << "\" font-family=\"sans-serif\" font-size=\"13\">"
        << caption << "</text>\n</svg>\n";
    return out.str();
  }
};

}  // namespace detail

/// Half-plane tiles drawn in (alpha, beta) coordinates; fill colour is the row label.
inline std::string hyper_svg(const std::vector<HTileAddress>& tiles, const BiSequence& omega) {
  double a0 = 1e300, a1 = -1e300, b1 = 0.0;
  for (const auto& t : tiles) {
    const auto r = h_region(t);
    a0 = std::min(a0, r.alpha_min);
    a1 = std::max(a1, r.alpha_max);
    b1 = std::max(b1, r.beta_max);
  }
  detail::SvgCanvas canvas{a0, a1, 0.0, b1, 800.0, 600.0, {}};
  for (const auto& t : tiles) {
    const auto r = h_region(t);
    canvas.rect(r.alpha_min, r.alpha_max, r.beta_min, r.beta_max, detail::label_fill(h_decorate(t, omega)),
                "(" + std::to_string(t.i) + "," + std::to_string(t.j) + ") label " +
                    std::to_string(h_decorate(t, omega)));
  }
  return canvas.finish("binary tiling, rows labelled by " + omega.name());
}

struct SliceSpec {
  // 'x' or 'y': that coordinate is fixed and the other is drawn against z/L, rows as
  // horizontal bands. 'z': z/L is fixed and the slice is drawn in (x, y).
  char axis = 'y';
  double value = 0.25;
};

inline SliceSpec parse_slice(const std::string& text) {
  if (text.size() < 3 || text[1] != '=' || (text[0] != 'x' && text[0] != 'y' && text[0] != 'z')) {
    throw ParameterError("slice must look like x=0.25, y=0.25 or z=0.5");
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text.substr(2), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() - 2 || !std::isfinite(value)) {
    throw ParameterError("slice value must be a number: '" + text + "'");
  }
  return {text[0], value};
}

/// Tiles meeting the slice whose free coordinates start in [0, extent); for x and y
/// slices rows row_lo..row_hi, for a z slice the single row floor(value).
struct SliceTiles {
  std::vector<std::pair<TileAddress, TileBox>> tiles;
};

inline SliceTiles slice_tiles(const SolParams& params, const SliceSpec& slice, Index row_lo, Index row_hi,
                              double extent) {
  if (!(extent > 0.0)) throw ParameterError("slice: extent must be positive");
  SliceTiles out;
  const auto add = [&](const TileAddress& t) {
    out.tiles.emplace_back(t, tile_box(params, t));
    if (out.tiles.size() > 20000) throw ResourceError("slice: too many tiles in the window");
  };
  const auto count = [&](double width) { return static_cast<Index>(std::ceil(extent / width)); };
  const auto width_x = [](Index i) { return std::ldexp(1.0, static_cast<int>(i)); };
  const auto width_y = [&](Index i) { return std::pow(params.delta(), static_cast<double>(i)); };
  if (slice.axis == 'z') {
    const auto i = static_cast<Index>(std::floor(slice.value));
    for (Index k = 0; k < count(width_y(i)); ++k) {
      for (Index j = 0; j < count(width_x(i)); ++j) add({i, j, k});
    }
    return out;
  }
  for (Index i = row_lo; i <= row_hi; ++i) {
    if (slice.axis == 'y') {
      const auto k = static_cast<Index>(std::floor(slice.value / width_y(i)));
      for (Index j = 0; j < count(width_x(i)); ++j) add({i, j, k});
    } else {
      const auto j = static_cast<Index>(std::floor(slice.value / width_x(i)));
      for (Index k = 0; k < count(width_y(i)); ++k) add({i, j, k});
    }
  }
  return out;
}

inline std::string slice_svg(const SolParams& params, const SliceSpec& slice, const BiSequence& omega,
                             Index row_lo, Index row_hi, double extent) {
  const auto tiles = slice_tiles(params, slice, row_lo, row_hi, extent);
  const double L = params.row_height();
  const std::string caption = std::string("slice ") + slice.axis + "=" + detail::fmt(slice.value) +
                              (slice.axis == 'z' ? " L" : ", z in units of L") + ", delta=" +
                              detail::fmt(params.delta());
  const double y0 = slice.axis == 'z' ? 0.0 : static_cast<double>(row_lo);
  const double y1 = slice.axis == 'z' ? extent : static_cast<double>(row_hi + 1);
  detail::SvgCanvas canvas{0.0, extent, y0, y1, 800.0, 600.0, {}};
  for (const auto& [t, box] : tiles.tiles) {
    const int label = omega.at(t.i);
    const std::string title = to_string(t) + " label " + std::to_string(label);
    if (slice.axis == 'z') {
      canvas.rect(box.x.lo, box.x.hi, box.y.lo, box.y.hi, detail::label_fill(label), title);
    } else {
      const Interval& across = slice.axis == 'y' ? box.x : box.y;
      canvas.rect(across.lo, across.hi, box.z.lo / L, box.z.hi / L, detail::label_fill(label), title);
    }
  }
  return canvas.finish(caption);
}

}  // namespace soltile
