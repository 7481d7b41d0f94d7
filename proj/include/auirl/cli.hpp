#pragma once

#include <iosfwd>

namespace auirl {

/**
 * Entry point of the `auirl` tool. Subcommands: train, eval, sweep, verify,
 * fit-reward, inspect, serve. Returns 0 on success, 1 on a runtime failure
 * and 2 on a usage error; failures print one JSON line on `err`.
 */
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace auirl
