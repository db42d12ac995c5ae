// Copyright 2026 The Fedring Authors
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

#ifndef FEDRING_ERRORS_H_
#define FEDRING_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fedring {

// Base for every error the library raises. Callers that only need to
// distinguish configuration problems from runtime failures can catch
// ConfigError and NonFiniteError and treat the rest as internal.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

// An iterate, gradient or loss left the finite range.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Raised when the secure aggregation ring cannot provide its guarantees,
// e.g. with fewer than three participants.
class ProtocolError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class SchemeMismatchError : public Error {
 public:
  using Error::Error;
};

class DecryptError : public Error {
 public:
  using Error::Error;
};

class AmbiguityError : public Error {
 public:
  using Error::Error;
};

// Operation applied to an observation of the wrong kind, e.g. a gradient
// attack on a ciphertext-only interception.
class TypeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class EmptyError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace fedring

#endif  // FEDRING_ERRORS_H_
