#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "honeyttl/transport.hpp"

namespace honeyttl::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitMissingInput = 3,
  kExitTransportFault = 4,
  kExitShodanAccess = 5,
};

/// Seams for tests. An empty factory means RawSocketTransport.
struct Hooks {
  std::function<std::unique_ptr<Transport>()> real_transport_factory;
};

/// Runs one subcommand. `args` excludes the program name. Errors are
/// reported on `err` as a single "error: class=<name> message=<text>" line.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        const Hooks &hooks = {});

} // namespace honeyttl::cli
