#include "cvsskit/errors.hpp"

namespace cvsskit {

const char* to_string(VectorErrorKind kind) {
    switch (kind) {
    case VectorErrorKind::BadPrefix:       return "bad prefix";
    case VectorErrorKind::WrongOrder:      return "wrong metric order";
    case VectorErrorKind::UnknownLabel:    return "unknown label";
    case VectorErrorKind::MissingMetric:   return "missing metric";
    case VectorErrorKind::TrailingGarbage: return "trailing garbage";
    }
    return "unknown";
}

MalformedVector::MalformedVector(VectorErrorKind kind, std::string where)
    : Error(std::string("malformed vector: ") + to_string(kind) + " (" + where + ")"),
      kind_(kind),
      where_(std::move(where)) {}

} // namespace cvsskit
