#pragma once

#include <stdexcept>
#include <string>

namespace wikinli {

// Bad flags, bad config files, invalid parameter combinations. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (corpora, models, fixtures). CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wikinli
