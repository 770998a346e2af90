#pragma once

// Planar plot data. Text format, one layer after another:
//   layer <kind> <label>
//   x y
//   ...
// with coordinates printed as %.17g and LF line endings.

#include <string>
#include <vector>

#include "rdo/core.h"

namespace rdo::cli {

enum class LayerKind { kPolygon, kEllipse, kPoint };
std::string to_string(LayerKind kind);

struct PlotLayer {
  LayerKind kind = LayerKind::kPolygon;
  std::string label;
  std::vector<Eigen::Vector2d> points;
};

struct PlotData {
  std::vector<PlotLayer> layers;
};

// Vertices of a bounded planar polytope, counterclockwise, duplicates merged.
// Throws DimensionNotPlottable for n != 2 and UnboundedPolytope when the
// region is unbounded.
std::vector<Eigen::Vector2d> polygon_vertices(const Polytope& p, double tol = 1e-9);

// 256 boundary points of {x | max_k x^T H_k x <= alpha}.
std::vector<Eigen::Vector2d> level_set_boundary(const std::vector<MatrixXd>& forms, double alpha,
                                                int samples = 256);

// Layers for P and S_r, plus the inner invariant set and both witnesses when
// they can be computed for this instance.
PlotData plot_instance(const RdoInstance& inst, int r, const Options& opts = {});

std::string format_plot(const PlotData& data);

}  // namespace rdo::cli
