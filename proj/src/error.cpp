// SPDX-License-Identifier: Apache-2.0

#include "scadoe/error.hpp"

namespace scadoe {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::MissingClass: return "MissingClass";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::EmptyPareto: return "EmptyPareto";
    case ErrorKind::CurveAbsent: return "CurveAbsent";
    }
    return "Unknown";
}

} // namespace scadoe
