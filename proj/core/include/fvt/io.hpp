#pragma once

// FVT: binary container for function-valued tensors.
//
//   "FVT1"                        4 bytes
//   u32 version (= 1)
//   u32 d
//   u64 dims[d]
//   u64 h
//   u8  gram kind (0 identity, 1 diagonal, 2 dense)
//   gram payload                  diagonal: h f64; dense: h*h f64 row-major
//   entries                       prod(dims) * h f64, big-endian multi-index
//                                 order, coefficients contiguous per entry
//
// All integers and IEEE-754 doubles are little-endian.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "fvt/btensor.hpp"

namespace fvt {

inline constexpr std::uint32_t kFvtVersion = 1;

struct FvtHeader {
  std::uint32_t version = kFvtVersion;
  Shape dims;
  std::uint64_t h = 0;
  GramKind gram_kind = GramKind::Identity;
};

void write_fvt(std::ostream& out, const BTensor& A);
BTensor read_fvt(std::istream& in);
FvtHeader read_fvt_header(std::istream& in);

void save_fvt(const BTensor& A, const std::string& path);
/// Throws BadMagic, BadVersion, TruncatedFile or NonSPDGram.
BTensor load_fvt(const std::string& path);
FvtHeader load_fvt_header(const std::string& path);

/// Whitespace-separated decimal numbers; used for Gram inputs on the CLI.
Eigen::VectorXd read_numbers(const std::string& path);

/// "%a" hex-float text and its exact inverse.
std::string hexfloat(double v);
double parse_hexfloat(const std::string& s);

}  // namespace fvt
