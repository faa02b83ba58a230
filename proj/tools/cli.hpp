#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace g2kern::cli {

// Exit codes: 0 pass, 1 fail verdict, 2 usage error, 3 numeric failure.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace g2kern::cli
