#include "pplab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

namespace pplab {

namespace {

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw std::runtime_error("read_field_binary: truncated stream");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field_csv(std::ostream& os, const Field& f) {
  const GridDomain& d = f.domain;
  static const char* names[] = {"x0", "x1", "x2"};
  for (int k = 0; k < d.n; ++k) os << names[k] << ',';
  os << (f.gauge == Gauge::u ? "u" : "mu") << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = d.point(i);
    for (int k = 0; k < d.n; ++k) os << fmt(x[k]) << ',';
    os << fmt(f.values[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

void write_field_csv(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_field_csv(os, f);
}

void write_field_binary(std::ostream& os, const Field& f) {
  put<std::int32_t>(os, f.domain.n);
  put<double>(os, f.domain.L);
  put<std::int32_t>(os, f.domain.M);
  put<double>(os, f.t);
  put<std::int32_t>(os, f.gauge == Gauge::u ? 0 : 1);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

void write_field_binary(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_field_binary(os, f);
}

Field read_field_binary(std::istream& is) {
  const int n = get<std::int32_t>(is);
  const double L = get<double>(is);
  const int M = get<std::int32_t>(is);
  const double t = get<double>(is);
  const int g = get<std::int32_t>(is);
  const GridDomain d(n, L, M);
  Eigen::ArrayXd v(static_cast<Eigen::Index>(d.size()));
  if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
    throw std::runtime_error("read_field_binary: truncated payload");
  return Field(d, std::move(v), t, g == 0 ? Gauge::u : Gauge::mu);
}

Field read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field_binary(is);
}

}  // namespace pplab
