#pragma once

#include <stdexcept>
#include <string>

namespace segtrial {

/// Error categories used across the library. The CLI maps these onto its
/// stable exit codes (see error::exit_code).
enum class errc {
  parse,              // malformed input file
  insufficient_data,  // not enough subjects / strata to compute
  boundary,           // bin straddles a segment or threshold boundary
  grid,               // grid or prior mismatch between curves
  config,             // invalid simulation / run configuration
  domain,             // argument outside the mathematical domain
  numeric,            // numerical underflow or instability
  out_of_range,       // value outside the supported range
  io,                 // file system failure
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}

  errc code() const noexcept { return code_; }

  /// Exit-code contract: 0 success, 2 parse, 3 insufficient data,
  /// 4 boundary, 5 grid/prior, 6 config, 1 anything else.
  int exit_code() const noexcept {
    switch (code_) {
      case errc::parse: return 2;
      case errc::insufficient_data: return 3;
      case errc::boundary: return 4;
      case errc::grid: return 5;
      case errc::config: return 6;
      default: return 1;
    }
  }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw error(code, msg); }

}  // namespace segtrial
