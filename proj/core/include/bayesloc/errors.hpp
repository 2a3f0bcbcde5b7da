// Copyright 2026 The bayesloc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BAYESLOC_ERRORS_HPP_
#define BAYESLOC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace bayesloc {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad metadata, shape mismatch, schema violation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An index or time outside the domain of the video it refers to.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A synthetic scenario configuration that cannot be realised.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch)
      : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace bayesloc

#endif  // BAYESLOC_ERRORS_HPP_
