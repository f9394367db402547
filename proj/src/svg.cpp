#include "emdq/svg.hpp"

#include "emdq/io.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

namespace emdq {

namespace {

struct Frame {
  double x0, y0, w, h;
};

Frame frame_of(const MatchSet& m) {
  Vec3 lo = m.x.front(), hi = lo;
  for (std::size_t i = 0; i < m.size(); ++i) {
    lo = lo.cwiseMin(m.x[i]).cwiseMin(m.y[i]);
    hi = hi.cwiseMax(m.x[i]).cwiseMax(m.y[i]);
  }
  const double pad = 0.02 * std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-9});
  return {lo.x() - pad, lo.y() - pad, hi.x() - lo.x() + 2 * pad, hi.y() - lo.y() + 2 * pad};
}

void open_svg(std::ostream& out, const Frame& f) {
  const double stroke = 0.002 * std::max(f.w, f.h);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(f.x0) << ' '
      << format_double(f.y0) << ' ' << format_double(f.w) << ' ' << format_double(f.h)
      << "\" stroke-width=\"" << format_double(stroke) << "\">\n"
      << "<rect x=\"" << format_double(f.x0) << "\" y=\"" << format_double(f.y0) << "\" width=\""
      << format_double(f.w) << "\" height=\"" << format_double(f.h) << "\" fill=\"white\"/>\n";
}

void line(std::ostream& out, const Vec3& a, const Vec3& b, const char* color) {
  out << "<line x1=\"" << format_double(a.x()) << "\" y1=\"" << format_double(a.y()) << "\" x2=\""
      << format_double(b.x()) << "\" y2=\"" << format_double(b.y()) << "\" stroke=\"" << color
      << "\"/>\n";
}

}  // namespace

void write_matches_svg(std::ostream& out, const MatchSet& m, const LabelResult& labels) {
  const Frame f = frame_of(m);
  open_svg(out, f);
  // Outliers first so inliers stay visible on top.
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < m.size(); ++i)
      if (labels.inlier[i] == (pass == 1))
        line(out, m.x[i], m.y[i], pass == 1 ? "#e6b800" : "black");
  out << "</svg>\n";
}

void write_field_svg(std::ostream& out, std::span<const FieldSample> samples, const MatchSet& m,
                     const LabelResult& labels) {
  const Frame f = frame_of(m);
  open_svg(out, f);
  const double r = 0.004 * std::max(f.w, f.h);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (labels.inlier[i])
      out << "<circle cx=\"" << format_double(m.x[i].x()) << "\" cy=\"" << format_double(m.x[i].y())
          << "\" r=\"" << format_double(r) << "\" fill=\"#e6b800\" stroke=\"none\"/>\n";
  for (const FieldSample& s : samples) {
    if (!s.valid) continue;
    line(out, s.query, s.displaced, "#1f4e9c");
    out << "<circle cx=\"" << format_double(s.query.x()) << "\" cy=\"" << format_double(s.query.y())
        << "\" r=\"" << format_double(0.5 * r) << "\" fill=\"#1f4e9c\" stroke=\"none\"/>\n";
  }
  out << "</svg>\n";
}

void save_svg_matches(const std::filesystem::path& path, const MatchSet& m,
                      const LabelResult& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_matches_svg(out, m, labels);
}

void save_svg_field(const std::filesystem::path& path, std::span<const FieldSample> samples,
                    const MatchSet& m, const LabelResult& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_field_svg(out, samples, m, labels);
}

}  // namespace emdq
