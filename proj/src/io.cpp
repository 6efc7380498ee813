#include "flowrec/io.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace flowrec {

namespace {

void write_bytes(const std::string& path, const void* data, size_t count) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(count));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<char> read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::streamsize n = f.tellg();
  f.seekg(0);
  std::vector<char> buf(static_cast<size_t>(n));
  f.read(buf.data(), n);
  if (!f) throw std::runtime_error("read failed: " + path);
  return buf;
}

double parse_double_line(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(0, eq);
    while (!k.empty() && (k.back() == ' ' || k.back() == '\t')) k.pop_back();
    size_t b = k.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    if (k.substr(b) != key) continue;
    return std::stod(line.substr(eq + 1));
  }
  throw std::runtime_error("descriptor missing key: " + key);
}

}  // namespace

void dump_raw(const double* data, size_t count, const std::string& path_base,
              const std::string& descriptor) {
  write_bytes(path_base + ".f64", data, count * sizeof(double));
  write_text_file(path_base + ".txt", descriptor);
}

std::vector<double> load_raw(const std::string& path_base,
                             size_t expected_count) {
  std::vector<char> bytes = read_bytes(path_base + ".f64");
  if (bytes.size() != expected_count * sizeof(double))
    throw std::runtime_error("size mismatch loading " + path_base);
  std::vector<double> out(expected_count);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

void dump_field(const ScalarField& f, const std::string& path_base) {
  std::ostringstream d;
  d.precision(17);
  d << "kind = scalar_field\n"
    << "nx = " << f.grid.nx << "\n"
    << "ny = " << f.grid.ny << "\n"
    << "x0 = " << f.grid.x0 << "\n"
    << "x1 = " << f.grid.x1 << "\n"
    << "y0 = " << f.grid.y0 << "\n"
    << "y1 = " << f.grid.y1 << "\n"
    << "layout = row_major_float64_le\n";
  dump_raw(f.v.data(), f.v.size(), path_base, d.str());
}

ScalarField load_field(const std::string& path_base) {
  std::string desc = read_text_file(path_base + ".txt");
  int nx = static_cast<int>(parse_double_line(desc, "nx"));
  int ny = static_cast<int>(parse_double_line(desc, "ny"));
  Grid g = make_grid(nx, ny, parse_double_line(desc, "x0"),
                     parse_double_line(desc, "x1"), parse_double_line(desc, "y0"),
                     parse_double_line(desc, "y1"));
  std::vector<char> bytes = read_bytes(path_base + ".f64");
  if (bytes.size() != static_cast<size_t>(g.size()) * sizeof(double))
    throw std::runtime_error("size mismatch loading " + path_base);
  ScalarField f(g);
  std::memcpy(f.v.data(), bytes.data(), bytes.size());
  return f;
}

std::string read_text_file(const std::string& path) {
  std::vector<char> b = read_bytes(path);
  return std::string(b.begin(), b.end());
}

void write_text_file(const std::string& path, const std::string& content) {
  write_bytes(path, content.data(), content.size());
}

namespace {

uint32_t be32(uint32_t x) {
  return ((x & 0xffu) << 24) | ((x & 0xff00u) << 8) | ((x >> 8) & 0xff00u) |
         ((x >> 24) & 0xffu);
}

void png_chunk(std::ofstream& out, const char type[4],
               const std::vector<unsigned char>& payload) {
  uint32_t len = be32(static_cast<uint32_t>(payload.size()));
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(type, 4);
  if (!payload.empty())
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
  uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(type), 4);
  if (!payload.empty())
    crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
  uint32_t crc_be = be32(static_cast<uint32_t>(crc));
  out.write(reinterpret_cast<const char*>(&crc_be), 4);
}

}  // namespace

void write_png16(const ScalarField& f, const std::string& path_base, double lo,
                 double hi) {
  const Grid& g = f.grid;
  const double span = hi > lo ? hi - lo : 1.0;
  // Scanlines: one filter byte, then big-endian 16-bit samples, top row first.
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<size_t>(g.ny) * (1 + 2 * g.nx));
  for (int j = g.ny - 1; j >= 0; --j) {
    raw.push_back(0);
    for (int i = 0; i < g.nx; ++i) {
      double t = (f.at(i, j) - lo) / span;
      if (t < 0.0) t = 0.0;
      if (t > 1.0) t = 1.0;
      auto q = static_cast<uint32_t>(t * 65535.0 + 0.5);
      if (q > 65535u) q = 65535u;
      raw.push_back(static_cast<unsigned char>(q >> 8));
      raw.push_back(static_cast<unsigned char>(q & 0xffu));
    }
  }
  uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> comp(comp_size);
  if (compress2(comp.data(), &comp_size, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("png compression failed");
  comp.resize(comp_size);

  std::ofstream out(path_base + ".png", std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path_base);
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a,
                                       '\n'};
  out.write(reinterpret_cast<const char*>(sig), 8);
  std::vector<unsigned char> ihdr(13);
  uint32_t w = be32(static_cast<uint32_t>(g.nx));
  uint32_t h = be32(static_cast<uint32_t>(g.ny));
  std::memcpy(ihdr.data(), &w, 4);
  std::memcpy(ihdr.data() + 4, &h, 4);
  ihdr[8] = 16;  // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = ihdr[11] = ihdr[12] = 0;
  png_chunk(out, "IHDR", ihdr);
  png_chunk(out, "IDAT", comp);
  png_chunk(out, "IEND", {});

  std::ostringstream d;
  d.precision(17);
  d << "kind = png16_window\n"
    << "lo = " << lo << "\n"
    << "hi = " << hi << "\n";
  write_text_file(path_base + ".png.txt", d.str());
}

}  // namespace flowrec
