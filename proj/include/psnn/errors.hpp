// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace psnn {

// Error categories map 1:1 onto CLI exit codes (see tools/psnn_main.cpp).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad config file / unknown key / malformed value.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem and container I/O failures (missing file, truncated blob, ...).
struct IoError : Error {
    using Error::Error;
};

// Violated model/plan invariants (shape mismatch, non-finite data, ...).
struct ValidationError : Error {
    using Error::Error;
};

} // namespace psnn
