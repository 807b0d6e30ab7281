#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ocvcap::cli {

// Exit codes, stable across releases:
//   0 success, 1 usage or flag parse error, 2 data or estimation error,
//   3 oracle certificate failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCertificate = 3;

// Runs one invocation; args exclude the program name. The result document
// goes to `out`, every diagnostic to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace ocvcap::cli
