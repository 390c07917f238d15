#pragma once

#include <iosfwd>

namespace ldtail::cli {

/// Exit codes: 0 success, 2 domain/range/usage errors, 3 I/O errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitIo = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ldtail::cli
