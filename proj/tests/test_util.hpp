#pragma once

// Shared test helpers (include after doctest.h).

#include <functional>

#include "segtrial/errors.hpp"

namespace testutil {

/// Runs fn, expecting a segtrial::error; returns its code.
inline segtrial::errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const segtrial::error& e) {
    return e.code();
  }
  FAIL("expected a segtrial::error");
  return segtrial::errc::io;
}

}  // namespace testutil
