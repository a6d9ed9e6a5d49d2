#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gradepipe {

/// Subcommands: preprocess, features, train, grade, evaluate, synth.
/// Returns 0 on success, 1 on usage errors, 2 on data or pipeline errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace gradepipe
