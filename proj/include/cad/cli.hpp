#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cad::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 ok, 1 usage or configuration error, 2 data or bundle error, 3 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

} // namespace cad::cli
