#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

enum class ErrorKind {
    ConstraintViolation,
    Overflow,
    EmptyStage,
    EmptyIntersection,
    Degenerate,
    EmptyParent,
    PointOutsideSupport,
    EmptyWindow,
    BudgetExceeded,
    MassEscaped,
    InsufficientShells,
    PrimeOutsideWindow,
    ExponentNonpositive,
    CorruptCache,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, std::string detail);

    ErrorKind kind() const { return kind_; }
    const std::string& module() const { return module_; }
    const std::string& detail() const { return detail_; }

private:
    ErrorKind kind_;
    std::string module_;
    std::string detail_;
};

}  // namespace dioph
