#ifndef FRACLAB_ERRORS_HPP
#define FRACLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fraclab {

enum class Errc {
  invalid_argument,
  non_finite_input,
  cylinder_out_of_range,
  empty_cylinder,
  under_resolved,
  domain_exceeded,
  grid_incompatible,
  tail_undeclared,
  tail_divergent,
  calibration_failed,
  cfl_violation,
  blow_up,
  insufficient_time_levels,
  no_valid_level,
  envelope_violated,
  search_exhausted,
  degenerate_input,
  hypothesis_violated,
  config_invalid,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) raise(code, msg);
}

}  // namespace fraclab

#endif
