#pragma once

// Binary field container:
//
//   offset  size  content
//   0       4     magic "SCMF"
//   4       2     version (u16, currently 1)
//   6       2     dims (u16, 1 or 2)
//   8       4     n (u32)
//   12      4     reserved (zero)
//   16      ...   extents as f64: (a, b) for 1D, R for 2D
//   ...     ...   values as f64, n (1D) or n*n row-major (2D)
//
// All integers and floats are little-endian.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

#include "scm/grids.hpp"

namespace scm {

inline constexpr std::uint16_t kFieldFormatVersion = 1;

using AnyField = std::variant<Field1D, Field2D>;

class FieldFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_field(std::ostream& out, const Field1D& field);
void write_field(std::ostream& out, const Field2D& field);
AnyField read_field(std::istream& in);

void save_field(const std::string& path, const AnyField& field);
AnyField load_field(const std::string& path);

/// "t,value" header then one row per node, values printed round-trip exact.
void write_field_csv(std::ostream& out, const Field1D& field);

}  // namespace scm
