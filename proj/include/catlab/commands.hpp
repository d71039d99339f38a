#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace catlab {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBoundFailure = 2;

// "a,b,c" or the geometric spec "lo:hi:factor" (lo, lo*factor, ... <= hi).
std::vector<std::int64_t> parse_T_list(const std::string& s);

// Output directory: $CATLAB_OUT_DIR when set, "out" otherwise.
std::string default_out_dir();

// Entry point for `catlab <subcommand> ...`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace catlab
