#pragma once

// String specs for scalar and vector fields sampled on a SpectralGrid.
//
// Scalar specs:
//   zero
//   const:c
//   gaussian:cx,cy[,amp[,width]]   amp*exp(-|y-c|^2/width^2), periodized by
//                                  summing the 3x3 nearest lattice translates
//   sinmode:m1,m2[,amp]            amp*sin(k.y), k = 2*pi*(m1/ly1, m2/ly2)
//   cosmode:m1,m2[,amp]
//   random:seed[,kmax[,amp]]       smooth random field on modes |m| <= kmax
//   grid:<path>                    GridDump file, must match the grid size
// Numbers may be written as multiples of pi: "pi", "-pi", "2pi", "0.5*pi".
//
// 3-vector specs (interior load g):
//   zero | const:gx,gy,gz | components:<scalar>|<scalar>|<scalar>

#include "koiter/field.hpp"
#include "koiter/spectral.hpp"

#include <array>
#include <string>

namespace koiter {

/// Parses a real number, accepting multiples of pi. Throws BadFieldSpec.
double parse_real(const std::string& token);

/// Throws BadFieldSpec on unknown or malformed specs.
ScalarField make_scalar_field(const std::string& spec, const SpectralGrid& grid);
std::array<ScalarField, 3> make_vector3_field(const std::string& spec, const SpectralGrid& grid);

/// Syntax check only (no file access); used by config validation.
void check_scalar_spec(const std::string& spec);
void check_vector3_spec(const std::string& spec);

} // namespace koiter
