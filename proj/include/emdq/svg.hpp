#pragma once

#include "emdq/core.hpp"
#include "emdq/field.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>

namespace emdq {

// SVG renderings in the xy plane (z is dropped for 3D data). Coordinates
// keep their image orientation: y grows downward.

/// One segment x_i -> y_i per match; inliers yellow, outliers black.
void write_matches_svg(std::ostream& out, const MatchSet& m, const LabelResult& labels);

/// Quiver plot of the valid field samples, with match inliers as dots.
void write_field_svg(std::ostream& out, std::span<const FieldSample> samples, const MatchSet& m,
                     const LabelResult& labels);

void save_svg_matches(const std::filesystem::path& path, const MatchSet& m,
                      const LabelResult& labels);
void save_svg_field(const std::filesystem::path& path, std::span<const FieldSample> samples,
                    const MatchSet& m, const LabelResult& labels);

}  // namespace emdq
