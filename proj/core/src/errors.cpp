#include "dioph/errors.hpp"

namespace dioph {

const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::EmptyStage: return "EmptyStage";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::EmptyParent: return "EmptyParent";
    case ErrorKind::PointOutsideSupport: return "PointOutsideSupport";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::MassEscaped: return "MassEscaped";
    case ErrorKind::InsufficientShells: return "InsufficientShells";
    case ErrorKind::PrimeOutsideWindow: return "PrimeOutsideWindow";
    case ErrorKind::ExponentNonpositive: return "ExponentNonpositive";
    case ErrorKind::CorruptCache: return "CorruptCache";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, std::string module, std::string detail)
    : std::runtime_error(std::string(kind_name(kind)) + "(" + detail + ") in " + module),
      kind_(kind), module_(std::move(module)), detail_(std::move(detail))
{
}

}  // namespace dioph
