#pragma once

#include <filesystem>
#include <ostream>
#include <string>

namespace remix::cli {

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;

/// `remix ingest|index|serve|eval ...`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// File name used for an example's canonical image inside an ingested
/// corpus directory.
std::string image_file_name(const std::string& example_id);

}  // namespace remix::cli
