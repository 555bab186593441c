#include "dnncover/render.hpp"

#include "dnncover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dnncover {

std::size_t frame_index(const Trajectory& traj, double t) {
  if (traj.times.empty()) throw RangeError("trajectory is empty");
  const double first = traj.times.front();
  const double last = traj.times.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(last));
  if (!std::isfinite(t) || t < first - slack || t > last + slack) {
    std::ostringstream os;
    os << "time " << t << " s lies outside the logged interval [" << first << ", " << last << "] s";
    throw RangeError(os.str());
  }
  auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
  if (it == traj.times.end()) return traj.times.size() - 1;
  std::size_t k = static_cast<std::size_t>(it - traj.times.begin());
  if (k > 0 && t - traj.times[k - 1] <= traj.times[k] - t) --k;
  return k;
}

std::vector<Segment> contour_segments(const HeatMap& map, const Vec2& lo, const Vec2& hi, int cells, double level) {
  const int n = cells + 1;
  const Vec2 h = (hi - lo) / static_cast<double>(cells);
  std::vector<double> v(static_cast<std::size_t>(n * n));
  auto node = [&](int i, int j) { return Vec2(lo.x() + i * h.x(), lo.y() + j * h.y()); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(j * n + i)] = map(node(i, j));
  }
  auto val = [&](int i, int j) { return v[static_cast<std::size_t>(j * n + i)]; };
  auto lerp = [&](const Vec2& a, double fa, const Vec2& b, double fb) {
    const double s = (level - fa) / (fb - fa);
    return Vec2(a + s * (b - a));
  };

  std::vector<Segment> out;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      // Corners counter-clockwise from bottom-left.
      const std::array<Vec2, 4> p{node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
      const std::array<double, 4> f{val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)};
      int mask = 0;
      for (int c = 0; c < 4; ++c) {
        if (f[static_cast<std::size_t>(c)] >= level) mask |= 1 << c;
      }
      if (mask == 0 || mask == 15) continue;
      auto edge = [&](int e) {
        const auto a = static_cast<std::size_t>(e);
        const auto b = static_cast<std::size_t>((e + 1) % 4);
        return lerp(p[a], f[a], p[b], f[b]);
      };
      std::vector<int> crossings;
      for (int e = 0; e < 4; ++e) {
        const bool a = (mask >> e) & 1;
        const bool b = (mask >> ((e + 1) % 4)) & 1;
        if (a != b) crossings.push_back(e);
      }
      if (crossings.size() == 2) {
        out.push_back({edge(crossings[0]), edge(crossings[1])});
      } else if (crossings.size() == 4) {
        const double centre = 0.25 * (f[0] + f[1] + f[2] + f[3]);
        const bool joined = (centre >= level) == static_cast<bool>(mask & 1);
        if (joined) {
          out.push_back({edge(0), edge(1)});
          out.push_back({edge(2), edge(3)});
        } else {
          out.push_back({edge(3), edge(0)});
          out.push_back({edge(1), edge(2)});
        }
      }
    }
  }
  return out;
}

namespace {

struct Viewport {
  Vec2 lo;
  Vec2 hi;
  double scale;  // px per meter
  double margin = 20.0;

  double px(double x) const { return margin + (x - lo.x()) * scale; }
  double py(double y) const { return margin + (hi.y() - y) * scale; }
  double width() const { return 2 * margin + (hi.x() - lo.x()) * scale; }
  double height() const { return 2 * margin + (hi.y() - lo.y()) * scale; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* layer_colour(int layer) {
  static const char* palette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22"};
  if (layer <= 0) return "#d62728";
  return palette[(layer - 1) % 7];
}

}  // namespace

std::string render_frame(const FrameInput& input, double t) {
  if (!input.trajectory || !input.graph || !input.heat_map) throw InvalidInputError("render_frame: missing input");
  const Trajectory& traj = *input.trajectory;
  const std::size_t k = frame_index(traj, t);
  const auto& row = traj.samples[k];

  Vec2 lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  auto extend = [&](const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (const auto& samples : traj.samples) {
    for (const AgentSample& s : samples) extend(s.position.head<2>());
  }
  for (const Application& app : input.heat_map->applications()) {
    for (const auto& zone : app.zones()) {
      for (const Vec2& v : zone) extend(v);
    }
  }
  if (input.desired) {
    for (const auto& [id, p] : *input.desired) extend(p);
  }
  const Vec2 pad = 0.05 * (hi - lo).cwiseMax(Vec2(1.0, 1.0));
  lo -= pad;
  hi += pad;
  Viewport vp{lo, hi, 800.0 / std::max(hi.x() - lo.x(), hi.y() - lo.y())};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(vp.width()) << "\" height=\""
      << fmt(vp.height()) << "\" viewBox=\"0 0 " << fmt(vp.width()) << " " << fmt(vp.height()) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Heat-map contours at fixed fractions of the sampled peak.
  const int cells = 120;
  double peak = 0.0;
  for (int j = 0; j <= cells; ++j) {
    for (int i = 0; i <= cells; ++i) {
      const Vec2 r(lo.x() + (hi.x() - lo.x()) * i / cells, lo.y() + (hi.y() - lo.y()) * j / cells);
      peak = std::max(peak, (*input.heat_map)(r));
    }
  }
  if (peak > 0.0) {
    svg << "<g fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1\">\n";
    for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      svg << "<path stroke-opacity=\"" << fmt(0.25 + 0.7 * frac) << "\" d=\"";
      for (const Segment& s : contour_segments(*input.heat_map, lo, hi, cells, frac * peak)) {
        svg << "M" << fmt(vp.px(s.a.x())) << " " << fmt(vp.py(s.a.y())) << "L" << fmt(vp.px(s.b.x())) << " "
            << fmt(vp.py(s.b.y()));
      }
      svg << "\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g fill=\"none\" stroke=\"#555\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\">\n";
  for (const Application& app : input.heat_map->applications()) {
    for (const auto& zone : app.zones()) {
      svg << "<polygon points=\"";
      for (std::size_t v = 0; v < zone.size(); ++v) {
        svg << (v ? " " : "") << fmt(vp.px(zone[v].x())) << "," << fmt(vp.py(zone[v].y()));
      }
      svg << "\"/>\n";
    }
  }
  svg << "</g>\n";

  // Paths travelled so far, at most ~200 vertices per agent.
  const std::size_t stride = std::max<std::size_t>(1, (k + 1) / 200);
  svg << "<g fill=\"none\" stroke=\"#d62728\" stroke-width=\"0.8\" stroke-dasharray=\"3 2\">\n";
  for (std::size_t i = 0; i < traj.ids.size(); ++i) {
    svg << "<polyline points=\"";
    for (std::size_t q = 0; q <= k; q += stride) {
      const Vec3& p = traj.samples[q][i].position;
      svg << (q ? " " : "") << fmt(vp.px(p.x())) << "," << fmt(vp.py(p.y()));
    }
    const Vec3& p = row[i].position;
    svg << " " << fmt(vp.px(p.x())) << "," << fmt(vp.py(p.y())) << "\"/>\n";
  }
  svg << "</g>\n";

  svg << "<g stroke=\"#888\" stroke-width=\"0.7\">\n";
  for (const auto& [id, nbrs] : input.graph->in_neighbors) {
    if (nbrs.empty()) continue;
    const Vec3& a = row[traj.agent_index(id)].position;
    for (AgentId j : nbrs) {
      const Vec3& b = row[traj.agent_index(j)].position;
      svg << "<line x1=\"" << fmt(vp.px(a.x())) << "\" y1=\"" << fmt(vp.py(a.y())) << "\" x2=\"" << fmt(vp.px(b.x()))
          << "\" y2=\"" << fmt(vp.py(b.y())) << "\"/>\n";
    }
  }
  svg << "</g>\n";

  if (input.desired) {
    svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
    for (const auto& [id, p] : *input.desired) {
      const double x = vp.px(p.x()), y = vp.py(p.y());
      svg << "<path d=\"M" << fmt(x - 3) << " " << fmt(y - 3) << "L" << fmt(x + 3) << " " << fmt(y + 3) << "M"
          << fmt(x - 3) << " " << fmt(y + 3) << "L" << fmt(x + 3) << " " << fmt(y - 3) << "\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g stroke=\"black\" stroke-width=\"0.5\">\n";
  for (std::size_t i = 0; i < traj.ids.size(); ++i) {
    const Vec3& p = row[i].position;
    svg << "<circle cx=\"" << fmt(vp.px(p.x())) << "\" cy=\"" << fmt(vp.py(p.y())) << "\" r=\"4\" fill=\""
        << layer_colour(input.graph->layer_of(traj.ids[i])) << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << fmt(vp.margin) << "\" y=\"" << fmt(vp.margin - 5) << "\" font-family=\"sans-serif\" "
      << "font-size=\"14\">t = " << fmt(traj.times[k]) << " s</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dnncover
