// Copyright 2026 The QMapLab Authors
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

#ifndef QMAPLAB_CORE_ERRORS_HPP_
#define QMAPLAB_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace qmaplab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed level or config text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& detail, int line, int column,
             const std::string& source = "")
      : Error((source.empty() ? std::string() : source + ": ") + "line " +
              std::to_string(line) + ", column " + std::to_string(column) +
              ": " + detail),
        detail_(detail),
        line_(line),
        column_(column) {}

  const std::string& detail() const noexcept { return detail_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

/// A caller broke a precondition (e.g. stepping a terminal state).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration or tensor shape.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Replay buffer holds fewer transitions than requested.
class NotReadyError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// World position that does not project into the current viewport.
class OutOfViewError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmaplab

#endif  // QMAPLAB_CORE_ERRORS_HPP_
