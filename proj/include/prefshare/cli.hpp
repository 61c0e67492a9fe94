#pragma once

namespace prefshare::cli {

// Entry point for the prefshare binary. Returns 0 on success, 1 for
// validation/contract failures (one-line reason on stderr), 2 for usage
// errors. All machine-readable outputs are written atomically and every
// output directory gets a resolved-config.txt sufficient to re-run.
int run(int argc, const char* const* argv);

}  // namespace prefshare::cli
