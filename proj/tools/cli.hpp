#pragma once

#include <iosfwd>

namespace rareval::cli {

// Runs one subcommand (eval, compare, discpower, stability, subset, synth,
// trajectory, report). Returns 0 on success, 2 on usage errors and 1 on
// data or format errors.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rareval::cli
