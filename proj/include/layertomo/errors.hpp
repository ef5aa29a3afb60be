#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace layertomo {

enum class ErrorKind { domain, config, io, numerical, invariant };

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::domain:
        case ErrorKind::config: return 2;
        case ErrorKind::io: return 3;
        case ErrorKind::numerical: return 4;
        case ErrorKind::invariant: return 5;
    }
    return 1;
}

inline const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::domain: return "domain_error";
        case ErrorKind::config: return "config_error";
        case ErrorKind::io: return "io_error";
        case ErrorKind::numerical: return "numerical_failure";
        case ErrorKind::invariant: return "invariant_violation";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorKind::numerical, w) {}
};
struct InvariantViolation : Error {
    explicit InvariantViolation(const std::string& w) : Error(ErrorKind::invariant, w) {}
};

// Extended-precision computation lost positivity or resolution past some order.
struct PrecisionExhausted : NumericalError {
    PrecisionExhausted(const std::string& w, std::size_t last_ok)
        : NumericalError(w + " (last trustworthy order " + std::to_string(last_ok) + ")"),
          last_trustworthy(last_ok) {}
    std::size_t last_trustworthy;
};

// A traveltime branch whose slope p(x) is not monotone.
struct BranchNotMonotone : InvariantViolation {
    BranchNotMonotone(std::size_t idx)
        : InvariantViolation("branch must be subdivided: p(x) not strictly monotone at sample " +
                             std::to_string(idx)),
          index(idx) {}
    std::size_t index;
};

}  // namespace layertomo
