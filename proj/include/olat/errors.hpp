// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace olat {

/// Base class for all olatkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when inputs violate a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Raised on file-system and format failures (missing files, bad headers,
/// truncated payloads, unsupported encodings).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace olat
