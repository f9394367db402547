#pragma once

#include "emdq/core.hpp"
#include "emdq/field.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace emdq {

enum class ParseErrorKind {
  io,
  bad_header,
  dimension_mismatch,
  non_numeric,
  truncated,
  extra_rows,
  inconsistent_gt,
};

const char* to_string(ParseErrorKind k);

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& what);
  ParseErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

/// Match CSV. First line: `dim,n,units` (values), then n rows of
/// `x1,..,xD,y1,..,yD[,gt]` with gt in {0,1} on all rows or none.
struct MatchFile {
  MatchSet matches;
  std::string units;
  std::optional<std::vector<bool>> gt;
};

MatchFile read_matches(std::istream& in, std::optional<int> expected_dim = std::nullopt);
MatchFile load_matches(const std::filesystem::path& path,
                       std::optional<int> expected_dim = std::nullopt);

void write_matches(std::ostream& out, const MatchSet& m, const std::string& units,
                   const std::vector<bool>* gt = nullptr);
void save_matches(const std::filesystem::path& path, const MatchSet& m, const std::string& units,
                  const std::vector<bool>* gt = nullptr);

/// Labels CSV: header `index,inlier,posterior,residual`.
void write_labels(std::ostream& out, const LabelResult& labels);
void save_labels(const std::filesystem::path& path, const LabelResult& labels);
LabelResult read_labels(std::istream& in);
LabelResult load_labels(const std::filesystem::path& path);

/// Field CSV: `qx,qy[,qz],dx,dy[,dz],support,valid` where d is the displaced
/// position of the query point.
void write_field(std::ostream& out, std::span<const FieldSample> samples, int dim);
void save_field(const std::filesystem::path& path, std::span<const FieldSample> samples, int dim);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace emdq
