// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scadoe {

enum class ErrorKind {
    InvalidInput,
    Io,
    MalformedFile,
    LengthMismatch,
    DegenerateInput,
    MissingClass,
    NumericalError,
    EmptyPareto,
    CurveAbsent,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception; `kind()` tells callers which failure class occurred.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
    throw Error(kind, what);
}

} // namespace scadoe
