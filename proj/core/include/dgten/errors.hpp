// Copyright 2026 The dgten Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dgten {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a domain rule (e.g. a zero rating).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or call arguments.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A quantity is undefined for the given input (empty edge set, single-class labels).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

/// Non-finite state during ODE integration.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Training diverged. `epoch()` is the epoch at which the loss became non-finite.
class TrainingError : public Error {
public:
    TrainingError(int epoch, const std::string& what)
        : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

/// Node id not known to a trained model.
class LookupError : public Error {
public:
    using Error::Error;
};

}  // namespace dgten
