// Copyright 2026 The metastab Authors
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

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace metastab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. The CLI maps ConfigError to exit code 2 and every other
// Error to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to a library call: wrong dimension, label, site, range.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// An object failed an invariant check (Hermiticity, trace, positivity).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A state that cannot be normalized (zero norm).
class DegenerateStateError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Right-eigenvector matrix too ill-conditioned to form a biorthogonal system.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// More than one zero eigenvalue where a unique steady state was requested.
class MultiplicityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Metastable window undefined because lambda_{m+1} has zero real part.
class IllPosedWindowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Spectral evolution requested on a spectrum that cannot support it.
class SpectralMethodError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : NumericalError(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

}  // namespace metastab
