#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dirac/problem.hpp"

namespace dirac {

// Problem files use a TOML subset:
//
//   interval = [a, b]
//   weights = [rho0, ..., rhon]
//   potential_breaks = [x1, ...]          # optional, see PotentialSpec
//
//   [boundary]                            # or dotted: boundary.a1 = [...]
//   a1 = [c0, c1, ...]                    # coefficients, constant term first
//   a2 = [...]
//   b1 = [...]
//   b2 = [...]
//
//   [[transmission]]                      # repeated, ordered by xi
//   xi = 1.5
//   theta = 1.0                           # default 1
//   gamma = [c0, c1, ...]                 # default zero polynomial
//
//   [[potential]]                         # repeated: none, one, or one per piece
//   kind = "zero" | "constant" | "poly"
//   p = 0.3        # constant: numbers; poly: coefficient arrays in x
//   q = 0.0
//   r = 0.3
//
// Supported values: numbers, double-quoted strings, booleans and (possibly
// multi-line) arrays of numbers. Unknown keys are rejected.

/// Parses a problem; throws Error(kParse) with a line number on malformed input.
/// The returned problem is not required to be valid.
DiracProblem parse_problem(std::string_view text);

/// Throws Error(kIo) if the file cannot be read.
DiracProblem load_problem(const std::filesystem::path& path);

/// Inverse of parse_problem for problems without caller-supplied potential
/// evaluators; numbers are written with 17 significant digits.
std::string serialize_problem(const DiracProblem& problem);

void save_problem(const std::filesystem::path& path, const DiracProblem& problem);

}  // namespace dirac
