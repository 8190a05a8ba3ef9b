#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "soibart/errors.hpp"

namespace soibart_test {

inline void expect_error(soibart::ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected " << soibart::error_code_name(code));
  } catch (const soibart::Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace soibart_test
