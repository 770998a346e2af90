#include "rdo/cli/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "rdo/inner.h"
#include "rdo/outer.h"
#include "rdo/switched.h"

namespace rdo::cli {

namespace {

void require_planar(int n) {
  if (n != 2) {
    throw Error(ErrorCode::kDimensionNotPlottable,
                "plots need n = 2, instance has n = " + std::to_string(n));
  }
}

std::vector<Eigen::Vector2d> as_points(const VectorXd& x) { return {Eigen::Vector2d(x(0), x(1))}; }

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kPolygon: return "polygon";
    case LayerKind::kEllipse: return "ellipse";
    case LayerKind::kPoint: return "point";
  }
  return "?";
}

std::vector<Eigen::Vector2d> polygon_vertices(const Polytope& p, double tol) {
  require_planar(p.dim());
  if (!check_bounded(p)) throw Error(ErrorCode::kUnboundedPolytope, "cannot plot an unbounded set");
  const MatrixXd& A = p.A();
  const VectorXd& b = p.b();
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();

  std::vector<Eigen::Vector2d> verts;
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = i + 1; j < p.rows(); ++j) {
      Eigen::Matrix2d M;
      M << A.row(i), A.row(j);
      const double det = M.determinant();
      if (std::abs(det) <= 1e-14 * M.cwiseAbs().maxCoeff() * M.cwiseAbs().maxCoeff()) continue;
      const Eigen::Vector2d v = M.partialPivLu().solve(Eigen::Vector2d(b(i), b(j)));
      if (p.violation(v) > tol * scale) continue;
      const bool seen = std::any_of(verts.begin(), verts.end(), [&](const Eigen::Vector2d& u) {
        return (u - v).norm() <= 1e3 * tol * scale;
      });
      if (!seen) verts.push_back(v);
    }
  }
  if (verts.empty()) return verts;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  for (const auto& v : verts) center += v;
  center /= static_cast<double>(verts.size());
  std::sort(verts.begin(), verts.end(), [&](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return std::atan2(u.y() - center.y(), u.x() - center.x()) <
           std::atan2(v.y() - center.y(), v.x() - center.x());
  });
  return verts;
}

std::vector<Eigen::Vector2d> level_set_boundary(const std::vector<MatrixXd>& forms, double alpha,
                                                int samples) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / samples;
    const Eigen::Vector2d d(std::cos(t), std::sin(t));
    double g = 0.0;
    for (const auto& H : forms) {
      require_planar(static_cast<int>(H.rows()));
      g = std::max(g, d.dot(H * d));
    }
    out.push_back(d * std::sqrt(alpha / g));
  }
  return out;
}

PlotData plot_instance(const RdoInstance& inst, int r, const Options& opts) {
  require_planar(inst.dim());
  PlotData data;
  data.layers.push_back({LayerKind::kPolygon, "P", polygon_vertices(inst.polytope)});
  data.layers.push_back({LayerKind::kPolygon, "S_" + std::to_string(r),
                         polygon_vertices(outer_set(inst, r, opts))});
  const OuterLevel lower = lower_bound(inst, r, opts);
  if (lower.argmin) data.layers.push_back({LayerKind::kPoint, "outer_argmin", as_points(*lower.argmin)});

  // Inner layers need rho < 1 and the origin inside P; skip them otherwise.
  try {
    if (!inst.dynamics.is_switched()) {
      const InnerLevel lvl = inner_sdp(inst, r, opts);
      data.layers.push_back({LayerKind::kEllipse, "E_" + std::to_string(r),
                             level_set_boundary({lvl.ellipsoid.M}, lvl.ellipsoid.alpha)});
      data.layers.push_back({LayerKind::kPoint, "inner_witness", as_points(lvl.witness)});
    } else {
      for (int l = 1; l <= 3; ++l) {
        if (!path_complete_feasible(inst.dynamics, l, opts)) continue;
        const SwitchedInnerLevel lvl = switched_inner_sdp(inst, l, r, opts);
        data.layers.push_back({LayerKind::kEllipse, "F_" + std::to_string(r),
                               level_set_boundary(lvl.sets.forms, lvl.sets.alpha)});
        data.layers.push_back({LayerKind::kPoint, "inner_witness", as_points(lvl.witness)});
        break;
      }
    }
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kUnstableDynamics:
      case ErrorCode::kOriginNotInterior:
      case ErrorCode::kInfeasibleLevel:
      case ErrorCode::kProductCapExceeded: break;
      default: throw;
    }
  }
  return data;
}

std::string format_plot(const PlotData& data) {
  std::string out;
  char buf[96];
  for (const auto& layer : data.layers) {
    out += "layer " + to_string(layer.kind) + " " + layer.label + "\n";
    for (const auto& p : layer.points) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
      out += buf;
    }
  }
  return out;
}

}  // namespace rdo::cli
