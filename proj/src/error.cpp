#include "cbjj/error.hpp"

namespace cbjj {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NonFiniteState: return "non-finite-state";
    case ErrorKind::Quadrature: return "quadrature-nonconvergence";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::DivideByZero: return "divide-by-zero";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Calibration: return "calibration-failure";
    case ErrorKind::Config: return "config";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
    case ErrorKind::Computation: return "computation";
    case ErrorKind::Cancelled: return "cancelled";
    }
    return "unknown";
}

}  // namespace cbjj
