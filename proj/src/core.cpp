#include "emdq/core.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace emdq {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("config: bad value for '" + std::string(key) + "': " +
                      std::string(v));
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("config: bad integer for '" + std::string(key) + "': " +
                      std::string(v));
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("config: bad boolean for '" + std::string(key) + "': " +
                    std::string(v));
}

}  // namespace

MatchSet MatchSet::make(int dim, std::vector<Vec3> x, std::vector<Vec3> y) {
  MatchSet m{dim, std::move(x), std::move(y)};
  m.validate();
  return m;
}

void MatchSet::validate() const {
  if (dim != 2 && dim != 3) throw Error("match set: dim must be 2 or 3");
  if (x.size() != y.size()) throw Error("match set: x and y differ in length");
  if (x.empty()) throw Error("match set: no matches");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!finite(x[i]) || !finite(y[i]))
      throw Error("match set: non-finite coordinate at match " + std::to_string(i));
    if (dim == 2 && (x[i].z() != 0.0 || y[i].z() != 0.0))
      throw Error("match set: 2D match " + std::to_string(i) + " has z != 0");
  }
}

bool RigidTransform::is_valid(double tol) const {
  if (!(mu > 0.0) || !std::isfinite(mu)) return false;
  if (!R.allFinite() || !t.allFinite()) return false;
  if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

std::size_t LabelResult::count_inliers() const {
  return static_cast<std::size_t>(std::count(inlier.begin(), inlier.end(), true));
}

void Config::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what);
  };
  need(H > 0.0 && std::isfinite(H), "H must be > 0");
  need(r > 0.0 && std::isfinite(r), "r must be > 0");
  need(a > 0.0 && std::isfinite(a), "a must be > 0");
  need(theta > 0.0, "theta must be > 0");
  need(ransac_p > 0.0 && ransac_p < 1.0, "ransac_p must be in (0, 1)");
  need(p_min > 0.0 && p_min < 1.0, "p_min must be in (0, 1)");
  need(t_min >= 1, "t_min must be >= 1");
  need(n_neighbor >= 1, "n_neighbor must be >= 1");
  need(n_reweight_iters >= 1, "n_reweight_iters must be >= 1");
  need(max_em_iters >= 1, "max_em_iters must be >= 1");
}

std::size_t Config::sparse_count(std::size_t n) const {
  const std::size_t want = n_sparse == 0 ? 200 : n_sparse;
  return std::min(n, want);
}

Config Config::defaults_3d(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw DegenerateScaleError("config: 3D scale must be positive");
  Config c;
  c.H = 0.1 * scale;
  c.r = 0.3 * scale;
  c.a = 20.0 / scale;
  c.n_neighbor = 50;
  return c;
}

double scale_estimate(const MatchSet& m) {
  const std::size_t n = m.size();
  if (n < 2) throw DegenerateScaleError("scale estimate needs at least two matches");
  Vec3 mx = Vec3::Zero(), my = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mx += m.x[i];
    my += m.y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += (m.x[i] - mx).squaredNorm() + (m.y[i] - my).squaredNorm();
  const double s = std::sqrt(acc / (2.0 * static_cast<double>(n)));
  if (!(s > 0.0)) throw DegenerateScaleError("all points coincide; scale is zero");
  return s;
}

Config default_config(const MatchSet& m) {
  return m.dim == 3 ? Config::defaults_3d(scale_estimate(m)) : Config::defaults_2d();
}

void set_config_value(Config& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "H") cfg.H = parse_double(key, value);
  else if (key == "t_min") cfg.t_min = parse_int<int>(key, value);
  else if (key == "ransac_p") cfg.ransac_p = parse_double(key, value);
  else if (key == "n_reweight_iters") cfg.n_reweight_iters = parse_int<int>(key, value);
  else if (key == "r") cfg.r = parse_double(key, value);
  else if (key == "a") cfg.a = parse_double(key, value);
  else if (key == "p_min") cfg.p_min = parse_double(key, value);
  else if (key == "theta") cfg.theta = parse_double(key, value);
  else if (key == "n_neighbor") cfg.n_neighbor = parse_int<int>(key, value);
  else if (key == "sparse") cfg.sparse = parse_bool(key, value);
  else if (key == "n_sparse") cfg.n_sparse = parse_int<std::size_t>(key, value);
  else if (key == "max_em_iters") cfg.max_em_iters = parse_int<int>(key, value);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, value);
  else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

void load_config_file(Config& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
    set_config_value(cfg, trim(sv.substr(0, eq)), sv.substr(eq + 1));
  }
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw Error("uniform_index: empty range");
  const std::uint64_t range = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return static_cast<std::size_t>(v % range);
}

}  // namespace emdq
