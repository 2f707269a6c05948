// Copyright 2026 The ttakit Authors
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

#include <stdexcept>
#include <string>

namespace ttakit {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A rectangle or index falls outside the object it addresses.
class OutOfBounds : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File contents do not follow the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A probability vector does not sum to one or has entries outside [0, 1].
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// An external predictor replied with something other than a probability line.
class ProtocolError : public Error {
 public:
  ProtocolError(std::size_t line, const std::string& what)
      : Error("predictor protocol error at reply line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ttakit
