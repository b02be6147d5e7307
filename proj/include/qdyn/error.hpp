#pragma once

#include <stdexcept>
#include <string>

namespace qdyn {

// Failure classes surfaced by the library.  CLI maps these to exit codes.
enum class errc {
  overflow,
  no_bracket,
  no_fixed_point,
  nonconverged,
  singular_jacobian,
  nesting_violation,
  first_return_violation,
  postcritical_collision,
  budget_exceeded,
  critical_hit,
  divergent_tail,
  no_expansion,
  no_return,
  empty_grid,
  bad_fit,
  degenerate_fit,
  range,
  parse,
  config,
  io,
  noncontractive,
  uncertifiable_range,
};

const char* errc_name(errc e);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace qdyn
