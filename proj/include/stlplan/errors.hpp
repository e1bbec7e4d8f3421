// Copyright 2026 The stlplan Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace stlplan {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Formula text that does not lex or parse.
struct SyntaxError : Error {
  using Error::Error;
};

// Formula that parses but falls outside the supported temporal fragment:
// nesting deeper than two temporal layers, leaves of one inner formula with
// different windows, or an interval whose lower bound is not zero.
struct FragmentError : Error {
  using Error::Error;
};

// Predicate refers to a coordinate the state embedding does not have.
struct DimensionError : Error {
  using Error::Error;
};

// Signal shorter than the formula horizon plus one.
struct SignalTooShortError : Error {
  using Error::Error;
};

// Containers whose dimensions do not match (state counts, action counts,
// horizons, table shapes).
struct ShapeError : Error {
  using Error::Error;
};

// A value outside its documented domain (probabilities off the simplex,
// negative costs, flag values out of range, inconsistent final flags).
struct DomainError : Error {
  using Error::Error;
};

// Invalid environment or experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

// MDP horizon does not equal the formula horizon plus one.
struct HorizonMismatchError : Error {
  using Error::Error;
};

// No policy meets the constraint threshold.
struct InfeasibleError : Error {
  using Error::Error;
};

// Iterative solver exhausted its budget before reaching tolerance.
struct ToleranceError : Error {
  using Error::Error;
};

// Overflow or non-finite intermediate in a numeric routine.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace stlplan
