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

#ifndef SPARSEDET_SPARSEDET_HPP_
#define SPARSEDET_SPARSEDET_HPP_

#include "sparsedet/errors.hpp"
#include "sparsedet/experiment.hpp"
#include "sparsedet/gaussian_model.hpp"
#include "sparsedet/io.hpp"
#include "sparsedet/linalg.hpp"
#include "sparsedet/objectives.hpp"
#include "sparsedet/oracle.hpp"
#include "sparsedet/rng.hpp"
#include "sparsedet/scenarios.hpp"
#include "sparsedet/selection.hpp"
#include "sparsedet/set_function.hpp"
#include "sparsedet/supsub.hpp"
#include "sparsedet/surrogate.hpp"

#endif  // SPARSEDET_SPARSEDET_HPP_
