#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "padmm/field.hpp"

namespace padmm::io {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Container layout:
//   line 1: "PADMM-CONTAINER 1"
//   line 2: compact JSON header {"fields":[{"name","width","height"},..],"meta":{..}}
//   then, per field in header order, width*height pairs of little-endian
//   float64 (re, im) in row-major order.
inline constexpr std::string_view magic = "PADMM-CONTAINER 1";

struct NamedField {
  std::string name;
  ComplexField field;
};

struct Container {
  json meta = json::object();
  std::vector<NamedField> fields;

  const ComplexField& get(const std::string& name) const {
    for (const auto& f : fields) {
      if (f.name == name) return f.field;
    }
    throw FormatError("container: no field named '" + name + "'");
  }
  bool has(const std::string& name) const {
    for (const auto& f : fields) {
      if (f.name == name) return true;
    }
    return false;
  }
  void add(std::string name, ComplexField f) { fields.push_back({std::move(name), std::move(f)}); }
};

namespace detail {

inline std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xff);
    return r;
  }
  return bits;
}

inline void put_f64(std::string& out, double x) {
  const auto bits = to_little(std::bit_cast<std::uint64_t>(x));
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

inline double get_f64(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  return std::bit_cast<double>(to_little(bits));
}

}  // namespace detail

inline std::string serialize(const Container& c) {
  json header;
  header["fields"] = json::array();
  std::size_t payload = 0;
  for (const auto& f : c.fields) {
    header["fields"].push_back(
        {{"name", f.name}, {"width", f.field.width()}, {"height", f.field.height()}});
    payload += 16 * f.field.size();
  }
  header["meta"] = c.meta;
  std::string out(magic);
  out += '\n';
  out += header.dump();
  out += '\n';
  out.reserve(out.size() + payload);
  for (const auto& f : c.fields) {
    for (const auto& z : f.field.samples()) {
      detail::put_f64(out, z.real());
      detail::put_f64(out, z.imag());
    }
  }
  return out;
}

inline Container parse(const std::string& bytes) {
  const auto first = bytes.find('\n');
  if (first == std::string::npos || bytes.compare(0, first, magic) != 0) {
    throw FormatError("container: bad magic line");
  }
  const auto second = bytes.find('\n', first + 1);
  if (second == std::string::npos) throw FormatError("container: missing header line");
  json header;
  try {
    header = json::parse(bytes.substr(first + 1, second - first - 1));
  } catch (const json::exception& e) {
    throw FormatError(std::string("container: header is not valid JSON: ") + e.what());
  }
  if (!header.contains("fields") || !header["fields"].is_array()) {
    throw FormatError("container: header lacks a field list");
  }
  Container c;
  c.meta = header.value("meta", json::object());
  std::size_t pos = second + 1;
  for (const auto& d : header["fields"]) {
    const auto w = d.at("width").get<std::size_t>();
    const auto h = d.at("height").get<std::size_t>();
    if (bytes.size() - pos < 16 * w * h) throw FormatError("container: truncated payload");
    ComplexField f(w, h);
    for (std::size_t i = 0; i < w * h; ++i, pos += 16) {
      f[i] = Complex(detail::get_f64(bytes.data() + pos), detail::get_f64(bytes.data() + pos + 8));
    }
    c.add(d.at("name").get<std::string>(), std::move(f));
  }
  if (pos != bytes.size()) throw FormatError("container: trailing bytes after payload");
  return c;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a sibling temporary file and rename, so readers never observe a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_container(const std::filesystem::path& path, const Container& c) {
  write_file_atomic(path, serialize(c));
}

inline Container read_container(const std::filesystem::path& path) { return parse(read_file(path)); }

/// 8-bit binary PGM of the modulus, mapped linearly from [0, peak] to [0, 255]
/// and clipped. peak <= 0 uses the image maximum.
inline std::string render_pgm(const ComplexField& f, double peak = 0.0) {
  if (!(peak > 0.0)) peak = max_abs(f);
  std::string out = "P5\n" + std::to_string(f.width()) + " " + std::to_string(f.height()) + "\n255\n";
  for (const auto& z : f.samples()) {
    double v = peak > 0.0 ? std::abs(z) / peak : 0.0;
    v = std::clamp(v, 0.0, 1.0);
    out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
  }
  return out;
}

inline void write_pgm(const std::filesystem::path& path, const ComplexField& f, double peak = 0.0) {
  write_file_atomic(path, render_pgm(f, peak));
}

}  // namespace padmm::io
