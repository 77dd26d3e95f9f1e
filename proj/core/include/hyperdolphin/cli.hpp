#pragma once

namespace hyperdolphin {

/// Entry point behind the hyperdolphin binary. Subcommands: gen, build, query,
/// bench, info. Returns 0 on success, 2 on usage errors, 1 on runtime errors.
/// The HYPERDOLPHIN_SEED environment variable, when set, overrides --seed.
int cli_main(int argc, const char* const* argv);

}  // namespace hyperdolphin
