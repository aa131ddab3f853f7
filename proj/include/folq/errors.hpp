// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>

namespace folq {

/// Domain error while evaluating a field or ring operation.
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A group/algebra operation left the admissible subalgebra.
struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace folq
