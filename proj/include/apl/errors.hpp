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

#ifndef APL_ERRORS_HPP_
#define APL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace apl {

/// Non-finite or out-of-domain numeric input.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Two matrices that must agree in shape do not.
class ShapeMismatch : public std::invalid_argument {
 public:
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A parameter struct violates its invariants.
class InvalidParams : public std::invalid_argument {
 public:
  explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

/// No sign change of the gradient slope was found while scanning for p*.
class NoCriticalPoint : public std::runtime_error {
 public:
  explicit NoCriticalPoint(const std::string& what) : std::runtime_error(what) {}
};

/// The metric has no defined value for this input (e.g. no relevant labels).
class UndefinedMetric : public std::runtime_error {
 public:
  explicit UndefinedMetric(const std::string& what) : std::runtime_error(what) {}
};

/// Training produced a non-finite loss.
class Divergence : public std::runtime_error {
 public:
  Divergence(int epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace apl

#endif  // APL_ERRORS_HPP_
