// Copyright 2026 The nhqfi Authors
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

namespace nhqfi {

/// Base class for every error raised by the library. Command-line front ends
/// map `ParameterError` to the configuration exit code and everything else to
/// the compute exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters or malformed input (odd N, non-finite fields, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A mathematically undefined request, e.g. the gauge map for K <= gamma or a
/// power-law fit over nonpositive data.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A momentum block sits on an exceptional point: its eigenvectors coalesce
/// and the ground state is not defined.
class DefectiveModeError : public Error {
 public:
  DefectiveModeError(const std::string& what, double phi) : Error(what), phi_(phi) {}
  double phi() const noexcept { return phi_; }

 private:
  double phi_;
};

/// A per-branch formula was called on a mode of the other branch.
class BranchError : public Error {
 public:
  using Error::Error;
};

/// Non-unitary growth left the double range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Two computations that must agree (derivative and normalization, residuals)
/// did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// The selected eigenstate changed identity between finite-difference points.
class LevelCrossingError : public Error {
 public:
  using Error::Error;
};

/// Dense Hilbert space too large.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Asymptotic formula requested outside its validity window.
class WindowError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhqfi
