#include "emdq/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace emdq {

const char* to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::io: return "io";
    case ParseErrorKind::bad_header: return "bad header";
    case ParseErrorKind::dimension_mismatch: return "dimension mismatch";
    case ParseErrorKind::non_numeric: return "non-numeric value";
    case ParseErrorKind::truncated: return "truncated file";
    case ParseErrorKind::extra_rows: return "extra rows";
    case ParseErrorKind::inconsistent_gt: return "inconsistent gt column";
  }
  return "unknown";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + to_string(kind) + ": " + what),
      kind_(kind),
      line_(line) {}

namespace {

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
      f.remove_suffix(1);
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

double number(std::string_view s, std::size_t line) {
  double v = 0.0;
  if (!parse_number(s, v)) throw ParseError(ParseErrorKind::non_numeric, line, std::string(s));
  return v;
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

MatchFile read_matches(std::istream& in, std::optional<int> expected_dim) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno))
    throw ParseError(ParseErrorKind::truncated, lineno, "missing header");
  auto head = split(line);
  if (head.size() >= 2 && head[0] == "dim" && head[1] == "n") {
    if (!next_content_line(in, line, lineno))
      throw ParseError(ParseErrorKind::truncated, lineno, "missing header values");
    head = split(line);
  }
  int dim = 0;
  std::size_t n = 0;
  if (head.size() < 2 || head.size() > 3 || !parse_number(head[0], dim) ||
      !parse_number(head[1], n))
    throw ParseError(ParseErrorKind::bad_header, lineno, "expected dim,n,units");
  if (dim != 2 && dim != 3) throw ParseError(ParseErrorKind::bad_header, lineno, "dim must be 2 or 3");
  if (n == 0) throw ParseError(ParseErrorKind::bad_header, lineno, "n must be >= 1");
  if (expected_dim && *expected_dim != dim)
    throw ParseError(ParseErrorKind::dimension_mismatch, lineno,
                     "file has dim " + std::to_string(dim) + ", expected " +
                         std::to_string(*expected_dim));

  MatchFile f;
  f.units = head.size() == 3 ? std::string(head[2]) : std::string();
  f.matches.dim = dim;
  f.matches.x.reserve(n);
  f.matches.y.reserve(n);
  const std::size_t cols = 2 * static_cast<std::size_t>(dim);
  std::optional<bool> has_gt;
  std::vector<bool> gt;

  for (std::size_t row = 0; row < n; ++row) {
    if (!next_content_line(in, line, lineno))
      throw ParseError(ParseErrorKind::truncated, lineno,
                       "expected " + std::to_string(n) + " rows, got " + std::to_string(row));
    const auto fields = split(line);
    if (fields.size() != cols && fields.size() != cols + 1)
      throw ParseError(ParseErrorKind::dimension_mismatch, lineno,
                       std::to_string(fields.size()) + " columns for dim " + std::to_string(dim));
    const bool row_gt = fields.size() == cols + 1;
    if (!has_gt) has_gt = row_gt;
    if (*has_gt != row_gt)
      throw ParseError(ParseErrorKind::inconsistent_gt, lineno, "gt column present on some rows only");
    Vec3 x = Vec3::Zero(), y = Vec3::Zero();
    for (int d = 0; d < dim; ++d) {
      x[d] = number(fields[static_cast<std::size_t>(d)], lineno);
      y[d] = number(fields[static_cast<std::size_t>(dim + d)], lineno);
    }
    if (row_gt) {
      const auto g = fields[cols];
      if (g != "0" && g != "1") throw ParseError(ParseErrorKind::non_numeric, lineno, "gt must be 0 or 1");
      gt.push_back(g == "1");
    }
    f.matches.x.push_back(x);
    f.matches.y.push_back(y);
  }
  if (next_content_line(in, line, lineno))
    throw ParseError(ParseErrorKind::extra_rows, lineno, "more rows than declared");
  try {
    f.matches.validate();
  } catch (const Error& e) {
    throw ParseError(ParseErrorKind::non_numeric, lineno, e.what());
  }
  if (has_gt.value_or(false)) f.gt = std::move(gt);
  return f;
}

MatchFile load_matches(const std::filesystem::path& path, std::optional<int> expected_dim) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::io, 0, "cannot open " + path.string());
  return read_matches(in, expected_dim);
}

void write_matches(std::ostream& out, const MatchSet& m, const std::string& units,
                   const std::vector<bool>* gt) {
  out << m.dim << ',' << m.size() << ',' << units << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int d = 0; d < m.dim; ++d) out << format_double(m.x[i][d]) << ',';
    for (int d = 0; d < m.dim; ++d) out << format_double(m.y[i][d]) << (d + 1 < m.dim ? "," : "");
    if (gt) out << ',' << ((*gt)[i] ? '1' : '0');
    out << '\n';
  }
}

void save_matches(const std::filesystem::path& path, const MatchSet& m, const std::string& units,
                  const std::vector<bool>* gt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_matches(out, m, units, gt);
}

void write_labels(std::ostream& out, const LabelResult& labels) {
  out << "index,inlier,posterior,residual\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << i << ',' << (labels.inlier[i] ? 1 : 0) << ',' << format_double(labels.posterior[i])
        << ',' << format_double(labels.residual[i]) << '\n';
}

void save_labels(const std::filesystem::path& path, const LabelResult& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_labels(out, labels);
}

LabelResult read_labels(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno))
    throw ParseError(ParseErrorKind::truncated, lineno, "missing header");
  if (split(line) != std::vector<std::string_view>{"index", "inlier", "posterior", "residual"})
    throw ParseError(ParseErrorKind::bad_header, lineno, "expected index,inlier,posterior,residual");
  LabelResult l;
  while (next_content_line(in, line, lineno)) {
    const auto f = split(line);
    if (f.size() != 4) throw ParseError(ParseErrorKind::dimension_mismatch, lineno, "expected 4 columns");
    std::size_t idx = 0;
    if (!parse_number(f[0], idx)) throw ParseError(ParseErrorKind::non_numeric, lineno, std::string(f[0]));
    if (idx != l.size()) throw ParseError(ParseErrorKind::bad_header, lineno, "indices must be 0..n-1 in order");
    if (f[1] != "0" && f[1] != "1") throw ParseError(ParseErrorKind::non_numeric, lineno, "inlier must be 0 or 1");
    l.inlier.push_back(f[1] == "1");
    l.posterior.push_back(number(f[2], lineno));
    l.residual.push_back(number(f[3], lineno));
  }
  return l;
}

LabelResult load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::io, 0, "cannot open " + path.string());
  return read_labels(in);
}

void write_field(std::ostream& out, std::span<const FieldSample> samples, int dim) {
  out << (dim == 3 ? "qx,qy,qz,dx,dy,dz,support,valid\n" : "qx,qy,dx,dy,support,valid\n");
  for (const FieldSample& s : samples) {
    for (int d = 0; d < dim; ++d) out << format_double(s.query[d]) << ',';
    for (int d = 0; d < dim; ++d) out << format_double(s.displaced[d]) << ',';
    out << format_double(s.support) << ',' << (s.valid ? 1 : 0) << '\n';
  }
}

void save_field(const std::filesystem::path& path, std::span<const FieldSample> samples, int dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_field(out, samples, dim);
}

}  // namespace emdq
