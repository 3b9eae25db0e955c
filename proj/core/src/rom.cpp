#include "fvt/rom.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fvt/io.hpp"

namespace fvt {

using nlohmann::json;

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "hat" || name == "piecewise_linear_hat") return BasisKind::Hat;
  if (name == "lagrange" || name == "lagrange_barycentric") return BasisKind::Lagrange;
  throw Error(ErrorCode::InvalidArgument, "unknown basis '" + std::string(name) + "'");
}

std::string_view to_string(BasisKind kind) noexcept {
  return kind == BasisKind::Hat ? "piecewise_linear_hat" : "lagrange_barycentric";
}

Shape ParamGrid::dims() const {
  Shape s;
  for (const auto& x : nodes) s.push_back(static_cast<std::size_t>(x.size()));
  return s;
}

void ParamGrid::validate() const {
  if (nodes.empty()) throw Error(ErrorCode::InvalidArgument, "parameter grid has no axes");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& x = nodes[k];
    if (x.size() == 0) throw Error(ErrorCode::InvalidArgument, "grid axis " + std::to_string(k) + " is empty");
    if (!x.allFinite()) throw Error(ErrorCode::InvalidArgument, "grid axis " + std::to_string(k) + " is not finite");
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      if (!(x(i) > x(i - 1))) {
        throw Error(ErrorCode::InvalidArgument, "grid axis " + std::to_string(k) + " is not strictly increasing");
      }
    }
  }
}

Eigen::VectorXd basis_eval(BasisKind kind, const Eigen::VectorXd& x, double a, bool* extrapolated) {
  const Eigen::Index n = x.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "basis_eval: empty grid");
  if (!std::isfinite(a)) throw Error(ErrorCode::DomainError, "basis_eval: non-finite parameter");
  const bool outside = a < x(0) || a > x(n - 1);
  if (extrapolated) *extrapolated = outside && kind == BasisKind::Lagrange;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);

  for (Eigen::Index j = 0; j < n; ++j) {
    if (a == x(j)) {
      phi(j) = 1.0;
      return phi;
    }
  }

  if (kind == BasisKind::Hat) {
    if (outside) {
      throw Error(ErrorCode::DomainError, "parameter " + std::to_string(a) + " outside [" + std::to_string(x(0)) +
                                              ", " + std::to_string(x(n - 1)) + "]");
    }
    const auto* it = std::upper_bound(x.data(), x.data() + n, a);
    const Eigen::Index j = (it - x.data()) - 1;
    const double t = (a - x(j)) / (x(j + 1) - x(j));
    phi(j) = 1.0 - t;
    phi(j + 1) = t;
    return phi;
  }

  // Barycentric form, second kind.
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m != j) w(j) /= (x(j) - x(m));
    }
  }
  double denom = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    phi(j) = w(j) / (a - x(j));
    denom += phi(j);
  }
  return phi / denom;
}

void RomModel::validate() const {
  grid.validate();
  const std::size_t d = grid.order();
  if (bases.size() != d) throw Error(ErrorCode::DimensionMismatch, "one basis per axis required");
  if (cross.factors().size() != d || cross.core().order() != d || cross.index_sets.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "model order differs from the grid");
  }
  for (std::size_t k = 0; k < d; ++k) {
    const auto& F = cross.factors()[k];
    if (static_cast<std::size_t>(F.rows()) != static_cast<std::size_t>(grid.nodes[k].size()) ||
        static_cast<std::size_t>(F.cols()) != cross.core().dims()[k]) {
      throw Error(ErrorCode::DimensionMismatch, "factor " + std::to_string(k) + " does not match grid and core");
    }
  }
}

RomModel make_rom(TuckerCrossModel cross, ParamGrid grid, BasisKind kind) {
  RomModel rom{std::move(cross), std::move(grid), {}};
  rom.bases.assign(rom.grid.order(), kind);
  rom.validate();
  return rom;
}

Encoding encode(const RomModel& rom, std::span<const double> alpha) {
  if (alpha.size() != rom.order()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(rom.order()) + " parameters");
  }
  Encoding e;
  for (std::size_t k = 0; k < rom.order(); ++k) {
    bool ex = false;
    const Eigen::VectorXd phi = basis_eval(rom.bases[k], rom.grid.nodes[k], alpha[k], &ex);
    e.extrapolated = e.extrapolated || ex;
    e.reduced.push_back(rom.cross.factors()[k].transpose() * phi);
  }
  return e;
}

HVec decode(const RomModel& rom, const std::vector<Eigen::VectorXd>& reduced) {
  const BTensor& core = rom.cross.core();
  if (reduced.size() != core.order()) throw Error(ErrorCode::DimensionMismatch, "decode: wrong number of vectors");
  for (std::size_t k = 0; k < reduced.size(); ++k) {
    if (static_cast<std::size_t>(reduced[k].size()) != core.dims()[k]) {
      throw Error(ErrorCode::DimensionMismatch, "decode: reduced vector " + std::to_string(k) + " has wrong length");
    }
  }
  // Kronecker weights, big-endian like the core columns.
  Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
  for (const auto& u : reduced) {
    Eigen::VectorXd next(w.size() * u.size());
    for (Eigen::Index a = 0; a < w.size(); ++a) next.segment(a * u.size(), u.size()) = w(a) * u;
    w = std::move(next);
  }
  return core.coeffs() * w;
}

HVec rom_eval(const RomModel& rom, std::span<const double> alpha) {
  // Sampled nodes return the stored core entry itself.
  if (alpha.size() == rom.order()) {
    MultiIndex pos(rom.order());
    bool sampled = true;
    for (std::size_t k = 0; k < rom.order() && sampled; ++k) {
      const auto& x = rom.grid.nodes[k];
      const auto* it = std::find(x.data(), x.data() + x.size(), alpha[k]);
      const auto& I = rom.cross.index_sets[k];
      const auto node = static_cast<std::size_t>(it - x.data());
      const auto at = std::lower_bound(I.begin(), I.end(), node);
      sampled = it != x.data() + x.size() && at != I.end() && *at == node;
      if (sampled) pos[k] = static_cast<std::size_t>(at - I.begin());
    }
    if (sampled) return rom.cross.core().entry(std::span<const std::size_t>(pos));
  }
  return decode(rom, encode(rom, alpha).reduced);
}

RomModel reuse_factors(const RomModel& rom, CachedOracle& fine) {
  if (fine.dims() != rom.grid.dims()) throw Error(ErrorCode::DimensionMismatch, "fine oracle dims differ from the model");
  RomModel out = rom;
  out.cross.decomp.core = sample_subtensor(fine, rom.cross.index_sets);
  out.validate();
  return out;
}

namespace {

json hex_array(const double* v, std::size_t n) {
  json a = json::array();
  for (std::size_t i = 0; i < n; ++i) a.push_back(hexfloat(v[i]));
  return a;
}

double hex_value(const json& j) {
  if (!j.is_string()) throw Error(ErrorCode::InvalidArgument, "expected a hex-float string");
  return parse_hexfloat(j.get<std::string>());
}

}  // namespace

void save_rom(const RomModel& rom, const std::string& json_path, const std::string& core_path) {
  rom.validate();
  save_fvt(rom.cross.core(), core_path);
  namespace fs = std::filesystem;
  const fs::path base = fs::path(json_path).parent_path();
  json doc;
  doc["format"] = "fvt-rom";
  doc["version"] = 1;
  doc["core"] = fs::relative(fs::absolute(core_path), fs::absolute(base.empty() ? fs::path(".") : base)).generic_string();
  doc["dims"] = rom.grid.dims();
  doc["h"] = rom.ip().dim();
  doc["grids"] = json::array();
  doc["bases"] = json::array();
  doc["index_sets"] = json::array();
  doc["factors"] = json::array();
  for (std::size_t k = 0; k < rom.order(); ++k) {
    const auto& x = rom.grid.nodes[k];
    doc["grids"].push_back(hex_array(x.data(), static_cast<std::size_t>(x.size())));
    doc["bases"].push_back(std::string(to_string(rom.bases[k])));
    json I = json::array();
    for (auto i : rom.cross.index_sets[k]) I.push_back(i + 1);
    doc["index_sets"].push_back(I);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> F = rom.cross.factors()[k];
    doc["factors"].push_back({{"rows", F.rows()},
                              {"cols", F.cols()},
                              {"data", hex_array(F.data(), static_cast<std::size_t>(F.size()))}});
  }
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + json_path + "' for writing");
  out << doc.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + json_path + "'");
}

RomModel load_rom(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + json_path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "'" + json_path + "': " + e.what());
  }
  try {
    if (doc.at("format") != "fvt-rom" || doc.at("version") != 1) {
      throw Error(ErrorCode::BadVersion, "'" + json_path + "' is not a version 1 ROM document");
    }
    RomModel rom;
    const auto& grids = doc.at("grids");
    const std::size_t d = grids.size();
    for (const auto& g : grids) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(g.size()));
      for (std::size_t i = 0; i < g.size(); ++i) x(static_cast<Eigen::Index>(i)) = hex_value(g[i]);
      rom.grid.nodes.push_back(std::move(x));
    }
    for (const auto& b : doc.at("bases")) rom.bases.push_back(parse_basis_kind(b.get<std::string>()));
    if (doc.at("index_sets").size() != d || doc.at("factors").size() != d) {
      throw Error(ErrorCode::DimensionMismatch, "index sets and factors must match the grids");
    }
    for (std::size_t k = 0; k < d; ++k) {
      IndexSet I;
      for (const auto& i : doc["index_sets"][k]) {
        const auto v = i.get<std::size_t>();
        if (v == 0 || v > static_cast<std::size_t>(rom.grid.nodes[k].size())) {
          throw Error(ErrorCode::IndexOutOfRange, "index sets are 1-based and within the grid");
        }
        I.push_back(v - 1);
      }
      if (!std::is_sorted(I.begin(), I.end()) || std::adjacent_find(I.begin(), I.end()) != I.end()) {
        throw Error(ErrorCode::InvalidArgument, "index sets must be sorted and duplicate-free");
      }
      rom.cross.index_sets.push_back(std::move(I));
      const auto& f = doc["factors"][k];
      const auto rows = f.at("rows").get<Eigen::Index>();
      const auto cols = f.at("cols").get<Eigen::Index>();
      const auto& data = f.at("data");
      if (data.size() != static_cast<std::size_t>(rows * cols)) {
        throw Error(ErrorCode::DimensionMismatch, "factor " + std::to_string(k) + " has the wrong number of values");
      }
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> F(rows, cols);
      for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = hex_value(data[static_cast<std::size_t>(i)]);
      rom.cross.decomp.factors.emplace_back(F);
    }
    namespace fs = std::filesystem;
    const fs::path core = fs::path(json_path).parent_path() / doc.at("core").get<std::string>();
    rom.cross.decomp.core = load_fvt(core.string());
    rom.validate();
    return rom;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "'" + json_path + "': " + e.what());
  }
}

}  // namespace fvt
