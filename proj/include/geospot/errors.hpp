// Copyright 2026 The Authors.
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

#ifndef GEOSPOT_ERRORS_HPP_
#define GEOSPOT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace geospot {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing input data: files, ids, rows, dimensions.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter combinations (lambda out of range, inactive modalities, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside a solver (overflow, pivot limit, infeasibility).
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace geospot

#endif  // GEOSPOT_ERRORS_HPP_
