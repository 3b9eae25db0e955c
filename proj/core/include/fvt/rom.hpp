#pragma once

// Encoder-decoder reduced-order model on top of a Tucker-cross approximation.
//
//   encode:  alpha_k -> u_k = F_k^T phi_k(alpha_k)          (length |I_k|)
//   decode:  (u_1, ..., u_d) -> core x_1 u_1^T ... x_d u_d^T  (an element of H)
//
// phi_k are interpolation bases with the delta property on the k-th
// parameter grid, so the model reproduces the sampled core exactly at the
// selected nodes.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fvt/btensor.hpp"
#include "fvt/sampler.hpp"

namespace fvt {

enum class BasisKind { Hat, Lagrange };

BasisKind parse_basis_kind(std::string_view name);
std::string_view to_string(BasisKind kind) noexcept;

/// Strictly increasing nodes per parameter axis.
struct ParamGrid {
  std::vector<Eigen::VectorXd> nodes;

  std::size_t order() const noexcept { return nodes.size(); }
  Shape dims() const;
  /// Throws InvalidArgument unless every axis is non-empty, finite and
  /// strictly increasing.
  void validate() const;
};

/// Values of all basis functions of one axis at `a`. Hats throw DomainError
/// outside [nodes.front(), nodes.back()]; Lagrange extrapolates and sets
/// `*extrapolated` when given.
Eigen::VectorXd basis_eval(BasisKind kind, const Eigen::VectorXd& nodes, double a, bool* extrapolated = nullptr);

struct RomModel {
  TuckerCrossModel cross;
  ParamGrid grid;
  std::vector<BasisKind> bases;

  std::size_t order() const noexcept { return grid.order(); }
  const InnerProduct& ip() const noexcept { return cross.core().ip(); }
  /// Throws DimensionMismatch when factor rows, grids and bases disagree.
  void validate() const;
};

RomModel make_rom(TuckerCrossModel cross, ParamGrid grid, BasisKind kind = BasisKind::Hat);

struct Encoding {
  std::vector<Eigen::VectorXd> reduced;
  bool extrapolated = false;
};

Encoding encode(const RomModel& rom, std::span<const double> alpha);
HVec decode(const RomModel& rom, const std::vector<Eigen::VectorXd>& reduced);
/// decode(encode(alpha)); at sampled nodes the stored core entry is returned.
HVec rom_eval(const RomModel& rom, std::span<const double> alpha);

/// Same index sets and factors; core resampled from `fine` (Prod_k |I_k|
/// evaluations on an empty cache).
RomModel reuse_factors(const RomModel& rom, CachedOracle& fine);

/// JSON document plus a companion FVT file holding the core. The JSON
/// records the core path relative to its own directory.
void save_rom(const RomModel& rom, const std::string& json_path, const std::string& core_path);
RomModel load_rom(const std::string& json_path);

}  // namespace fvt
