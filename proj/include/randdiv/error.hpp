#pragma once

#include <stdexcept>
#include <string>

namespace randdiv {

enum class ErrorKind {
    invalid_parameter,
    range_error,
    data_error,
    dimension_mismatch,
    certificate_geometry,
    precondition,
    solver_failure,
    spectrum_exhausted,
    empty_contributing_set,
    insufficient_data,
    parse_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace randdiv
