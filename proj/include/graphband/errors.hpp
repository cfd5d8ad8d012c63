#pragma once

#include <stdexcept>
#include <string>

namespace graphband {

// Bad user input (files, flags, parameter combinations). CLI exit code 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A violated internal invariant (scheduler cover, round conservation,
// activation bound). Not recoverable; CLI exit code 2.
struct invariant_error : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace graphband
