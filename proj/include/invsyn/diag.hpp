/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace invsyn {

// Base class for all errors raised by the library.  Everything user-facing
// (bad input files, ill-sorted expressions, violated preconditions of the
// reduction) is reported through these; plain asserts guard internal
// invariants only.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem-description errors: parse failures, sort errors, signature misuse.
struct SpecError : Error {
  SpecError(const std::string & msg, int line = 0, int col = 0)
      : Error(line > 0 ? "input:" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg
                       : msg),
        line(line),
        col(col)
  {
  }
  int line, col;
};

// A contract of the reduction/elimination machinery was violated
// (e.g. a clause set declared as a locality level whose variables do not all
// occur below extension symbols, or a disjunct cap exceeded).
struct ContractError : Error {
  using Error::Error;
};

// External solver process trouble (spawn failure, protocol garbage).
struct SolverError : Error {
  using Error::Error;
};

}  // namespace invsyn
