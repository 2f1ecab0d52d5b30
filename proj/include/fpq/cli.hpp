#pragma once

namespace fpq::cli {

// Entry point behind the fpq binary. Exit codes: 0 ok, 2 usage/config
// error, 3 data error.
int run(int argc, const char* const* argv);

}  // namespace fpq::cli
