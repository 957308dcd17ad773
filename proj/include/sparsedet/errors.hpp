// Copyright 2026 The sparsedet Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPARSEDET_ERRORS_HPP_
#define SPARSEDET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sparsedet {

// Invalid algorithm parameter (out-of-range beta, subset size, complexity
// guard violations, malformed configuration values, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mismatched or out-of-range dimensions/indices.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: factorization breakdown (non-positive pivot),
// non-positive Schur complements, loss of positive definiteness.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Set-function evaluation failure, annotated with the offending candidate
// when raised inside a search loop.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparsedet

#endif  // SPARSEDET_ERRORS_HPP_
