// Copyright 2026 The lqscreen Authors.
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
#include <utility>

#include <Eigen/Core>

namespace lqscreen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Root bracket without a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Iteration budget exhausted. Carries the last iterate when one exists.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what,
                            Eigen::VectorXd last_iterate = {})
      : Error(what), last_iterate_(std::move(last_iterate)) {}
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

 private:
  Eigen::VectorXd last_iterate_;
};

// Non-finite value encountered while integrating, reported with its location.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double at)
      : Error(what + " at t=" + std::to_string(at)), at_(at) {}
  double at() const { return at_; }

 private:
  double at_;
};

// Quantity undefined at a degenerate input (e.g. zero contingent slope).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lqscreen
