#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fvt {

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  NonSPD,
  NonSymmetric,
  NonPositiveWeight,
  EmptyIndexSet,
  IndexOutOfRange,
  InvalidArgument,
  DomainError,
  CacheOverflow,
  BadMagic,
  BadVersion,
  TruncatedFile,
  NonSPDGram,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every fvt routine; carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fvt
