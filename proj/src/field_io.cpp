#include "scm/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "scm/format.hpp"

namespace scm {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw FieldFormatError("truncated field container");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_header(std::ostream& out, std::uint16_t dims, std::uint32_t n) {
  out.write("SCMF", 4);
  put_le<std::uint16_t>(out, kFieldFormatVersion);
  put_le<std::uint16_t>(out, dims);
  put_le<std::uint32_t>(out, n);
  put_le<std::uint32_t>(out, 0);
}

}  // namespace

void write_field(std::ostream& out, const Field1D& field) {
  put_header(out, 1, static_cast<std::uint32_t>(field.grid().n()));
  put_le(out, field.grid().a());
  put_le(out, field.grid().b());
  for (double v : field.values()) put_le(out, v);
  if (!out) throw FieldFormatError("failed writing field container");
}

void write_field(std::ostream& out, const Field2D& field) {
  put_header(out, 2, static_cast<std::uint32_t>(field.grid().n()));
  put_le(out, field.grid().half_extent());
  for (double v : field.values()) put_le(out, v);
  if (!out) throw FieldFormatError("failed writing field container");
}

AnyField read_field(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SCMF", 4) != 0) throw FieldFormatError("bad field container magic");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kFieldFormatVersion) {
    throw FieldFormatError("unsupported field container version " + std::to_string(version));
  }
  const auto dims = get_le<std::uint16_t>(in);
  const auto n = get_le<std::uint32_t>(in);
  (void)get_le<std::uint32_t>(in);
  if (n == 0 || n % 2 != 0 || n > (1u << 16)) throw FieldFormatError("invalid grid size in field container");

  try {
    if (dims == 1) {
      const double a = get_le<double>(in);
      const double b = get_le<double>(in);
      std::vector<double> values(n);
      for (auto& v : values) v = get_le<double>(in);
      return Field1D(Grid1D(a, b, static_cast<int>(n)), std::move(values));
    }
    if (dims == 2) {
      const double R = get_le<double>(in);
      std::vector<double> values(static_cast<std::size_t>(n) * n);
      for (auto& v : values) v = get_le<double>(in);
      return Field2D(Grid2D(R, static_cast<int>(n)), std::move(values));
    }
  } catch (const std::invalid_argument& e) {
    throw FieldFormatError(std::string("invalid field container contents: ") + e.what());
  }
  throw FieldFormatError("unsupported dimension count " + std::to_string(dims));
}

void save_field(const std::string& path, const AnyField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FieldFormatError("cannot open " + path + " for writing");
  std::visit([&](const auto& f) { write_field(out, f); }, field);
}

AnyField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldFormatError("cannot open " + path);
  return read_field(in);
}

void write_field_csv(std::ostream& out, const Field1D& field) {
  out << "t,value\n";
  for (int j = 0; j < field.grid().n(); ++j) {
    out << format_double(field.grid().node(j)) << ',' << format_double(field[j]) << '\n';
  }
}

}  // namespace scm
