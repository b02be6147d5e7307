#include "qdyn/error.hpp"

namespace qdyn {

const char* errc_name(errc e) {
  switch (e) {
    case errc::overflow: return "OVERFLOW";
    case errc::no_bracket: return "NO_BRACKET";
    case errc::no_fixed_point: return "NO_FIXED_POINT";
    case errc::nonconverged: return "NONCONVERGED";
    case errc::singular_jacobian: return "SINGULAR_JACOBIAN";
    case errc::nesting_violation: return "NESTING_VIOLATION";
    case errc::first_return_violation: return "FIRST_RETURN_VIOLATION";
    case errc::postcritical_collision: return "POSTCRITICAL_COLLISION";
    case errc::budget_exceeded: return "BUDGET_EXCEEDED";
    case errc::critical_hit: return "CRITICAL_HIT";
    case errc::divergent_tail: return "DIVERGENT_TAIL";
    case errc::no_expansion: return "NO_EXPANSION";
    case errc::no_return: return "NO_RETURN";
    case errc::empty_grid: return "EMPTY_GRID";
    case errc::bad_fit: return "BAD_FIT";
    case errc::degenerate_fit: return "DEGENERATE_FIT";
    case errc::range: return "RANGE";
    case errc::parse: return "PARSE";
    case errc::config: return "CONFIG";
    case errc::io: return "IO";
    case errc::noncontractive: return "NONCONTRACTIVE";
    case errc::uncertifiable_range: return "UNCERTIFIABLE_RANGE";
  }
  return "UNKNOWN";
}

}  // namespace qdyn
