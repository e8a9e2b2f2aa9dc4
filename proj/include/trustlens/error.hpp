#pragma once

#include <stdexcept>
#include <string>

namespace trustlens {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An opinion whose components leave [0,1] or do not sum to one.
class invalid_opinion : public error {
public:
    using error::error;
};

/// Consensus of two dogmatic (zero-uncertainty) opinions.
class degenerate_consensus : public error {
public:
    using error::error;
};

/// Inverse mapping requested for a vacuous opinion.
class no_information : public error {
public:
    using error::error;
};

/// Malformed or inconsistent rating data.
class data_error : public error {
public:
    using error::error;
};

/// Configuration parse or range violation.
class config_error : public error {
public:
    using error::error;
};

} // namespace trustlens
