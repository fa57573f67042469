#include "vibcs/error.hpp"

namespace vibcs {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::index: return "index";
    case ErrorKind::symmetry: return "symmetry";
    case ErrorKind::rank_deficient: return "rank_deficient";
    case ErrorKind::undefined_metric: return "undefined_metric";
    case ErrorKind::resource: return "resource";
    case ErrorKind::parse: return "parse";
    case ErrorKind::format: return "format";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace vibcs
