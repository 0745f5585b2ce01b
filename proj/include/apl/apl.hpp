/*
 * Copyright 2026 The APL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef APL_APL_HPP_
#define APL_APL_HPP_

#include "apl/analysis.hpp"
#include "apl/errors.hpp"
#include "apl/io.hpp"
#include "apl/loss.hpp"
#include "apl/matrix.hpp"
#include "apl/metrics.hpp"
#include "apl/random.hpp"
#include "apl/synth_data.hpp"
#include "apl/trainer.hpp"

#endif  // APL_APL_HPP_
