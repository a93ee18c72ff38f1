#include <sstream>

#include "randdiv/error.hpp"
#include "randdiv/geometry.hpp"

namespace randdiv {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::range_error: return "range-error";
        case ErrorKind::data_error: return "data-error";
        case ErrorKind::dimension_mismatch: return "dimension-mismatch";
        case ErrorKind::certificate_geometry: return "certificate-geometry-error";
        case ErrorKind::precondition: return "precondition-violation";
        case ErrorKind::solver_failure: return "solver-failure";
        case ErrorKind::spectrum_exhausted: return "spectrum-exhausted";
        case ErrorKind::empty_contributing_set: return "empty-contributing-set";
        case ErrorKind::insufficient_data: return "insufficient-data";
        case ErrorKind::parse_error: return "parse-error";
    }
    return "error";
}

std::string to_string(const Site& j, int dim) {
    std::ostringstream os;
    os << '(';
    for (int k = 0; k < dim; ++k) os << (k ? "," : "") << j[k];
    os << ')';
    return os.str();
}

std::string to_string(const Point& x, int dim) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (int k = 0; k < dim; ++k) os << (k ? "," : "") << x[k];
    os << ')';
    return os.str();
}

}  // namespace randdiv
