#pragma once

// fvt command-line front end, as a library so tests can drive it in-process.
//
//   fvt gen      synthetic family -> FVT file
//   fvt build    TuckerABC -> ROM model JSON + core FVT + report JSON
//   fvt hosvd    truncated HOSVD -> core FVT + factors JSON + spectra TSV
//   fvt compare  TuckerABC vs HOSVD error table (TSV)
//   fvt eval     ROM evaluation at a parameter point
//   fvt info     header summary of an FVT file or ROM document
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <iosfwd>
#include <string>
#include <vector>

namespace fvt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// printf("%.17g").
std::string format_double(double v);

}  // namespace fvt::cli
