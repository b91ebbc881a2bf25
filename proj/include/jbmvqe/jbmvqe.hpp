// Copyright 2026 The jbmvqe Authors
//
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

#pragma once

// Umbrella header.

#include "jbmvqe/bell.hpp"
#include "jbmvqe/eigensolver.hpp"
#include "jbmvqe/error.hpp"
#include "jbmvqe/experiment.hpp"
#include "jbmvqe/grouping.hpp"
#include "jbmvqe/pauli.hpp"
#include "jbmvqe/shot_model.hpp"
#include "jbmvqe/statevector.hpp"
#include "jbmvqe/vqe.hpp"
