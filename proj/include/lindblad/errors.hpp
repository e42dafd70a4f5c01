// Copyright 2026 The lindblad Authors
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

namespace lindblad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes do not agree (non-square input, mismatched operands, bad factorization).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A requested dimension does not fit in the index type.
class SizeError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// A check against a scalar residual failed; `value()` carries the offending number.
class ResidualError : public Error {
 public:
  ResidualError(const std::string& what, double value) : Error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Tr[rho] is not 1. value() is the trace that was found.
class TraceError : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

/// Matrix is not Hermitian. value() is the max entrywise |m - m^dagger|
/// (or the imaginary part of an expectation value).
class HermiticityError : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

/// Matrix has a negative eigenvalue. value() is that eigenvalue.
class PositivityError : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

/// Tr[rho^2] outside [1/d, 1]. value() is the purity.
class PurityError : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

/// Vector expected to be normalized is not. value() is its norm.
class NormalizationError : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

/// Choi matrix has an eigenvalue below -tol, so the map is not completely positive.
class NegativeChoiError : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

/// Channel output failed validation and the Kraus set is not complete.
/// value() is the completeness residual.
class NotTracePreservingError : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

/// Invalid model parameters (negative rates, non-Hermitian Hamiltonian, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// The linear system of an implicit step is singular or badly conditioned.
class StepSolveError : public Error {
 public:
  using Error::Error;
};

/// Spectral propagation was asked to use a Liouvillian with flagged eigenpairs.
class DefectiveLiouvillian : public Error {
 public:
  using Error::Error;
};

}  // namespace lindblad
