#pragma once

#include <stdexcept>
#include <string>

namespace quoteattr {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Corpus files violate a structural invariant (bad spans, duplicate
// aliases, unresolvable speakers, ...). CLI exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// Backend/transport failure after retries. CLI exit code 1.
struct TransportError : Error {
    using Error::Error;
};

// Requested operation needs a capability the configured backend lacks
// (e.g. token scoring). CLI exit code 3.
struct CapabilityError : Error {
    using Error::Error;
};

// Missing prerequisite artifact or bad invocation. CLI exit code 4.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace quoteattr
