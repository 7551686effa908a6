#pragma once

// The `slab` command line:
//
//   slab [--config PATH] [--format json|csv|text] [--seed N] [--tol-point X] [--tol-quad Y] [--out PATH]
//        soliton verify --soliton NAME [--grid NRxNT] [--rmax R] [--samples N]
//        map analyze    --map NAME [--soliton NAME] [--point x,y,...]... [--grid NRxNT] [--rmax R] [--samples N] [--csv PATH]
//        inequality     --theorem NAME --map NAME --soliton NAME [--radii R1,R2,...] [--rmax R] [--csv PATH]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error,
// 3 numerical or domain error.

#include <iosfwd>
#include <string>
#include <vector>

namespace slab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace slab::cli
