#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "ibprof/ibprof.hpp"
#include "instances.hpp"

namespace testing_support {

inline void expect_code(ibprof::ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << ibprof::to_string(code);
  } catch (const ibprof::Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace testing_support
