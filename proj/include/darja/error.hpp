#pragma once

#include <stdexcept>
#include <string>

namespace darja {

// Malformed input data: dataset lines, lexicons, template files, documents.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Persisted artifact failed validation (bad magic, version, truncation).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical or configuration failure while training or serving.
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure talking to an embedding or generation backend.
class ProviderError : public std::runtime_error {
public:
    ProviderError(const std::string& what, bool retryable)
        : std::runtime_error(what), retryable_(retryable) {}

    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

}  // namespace darja
