#pragma once

// Field dump format:
//
//   triwave-field v1 N=<n> L=<l> M=<m>
//   <M^N whitespace-separated decimal values, row-major>
//
// The binary variant keeps the same header line (terminated by '\n') and
// follows it with M^N 64-bit little-endian IEEE doubles.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "triwave/error.hpp"
#include "triwave/grid.hpp"

namespace triwave {

enum class FieldFormat { Text, Binary, Auto };

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string field_header(const GridSpec& g) {
  return "triwave-field v1 N=" + std::to_string(g.dimension) + " L=" + format_real(g.halfwidth) +
         " M=" + std::to_string(g.points_per_axis);
}

inline GridSpec parse_field_header(const std::string& line) {
  std::istringstream in(line);
  std::string magic, version, n_tok, l_tok, m_tok;
  in >> magic >> version >> n_tok >> l_tok >> m_tok;
  if (magic != "triwave-field" || version != "v1" || n_tok.rfind("N=", 0) != 0 ||
      l_tok.rfind("L=", 0) != 0 || m_tok.rfind("M=", 0) != 0) {
    throw InvalidArgument("not a triwave-field v1 header: '" + line + "'");
  }
  GridSpec g;
  try {
    g.dimension = std::stoi(n_tok.substr(2));
    g.halfwidth = std::stod(l_tok.substr(2));
    g.points_per_axis = std::stoi(m_tok.substr(2));
  } catch (const std::exception&) {
    throw InvalidArgument("malformed triwave-field header: '" + line + "'");
  }
  g.validate();
  return g;
}

inline void put_le_double(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

inline double get_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline std::string encode_field(const Field& f, FieldFormat format = FieldFormat::Text) {
  std::string out = detail::field_header(f.spec());
  out.push_back('\n');
  if (format == FieldFormat::Binary) {
    out.reserve(out.size() + 8 * f.size());
    for (double v : f.values()) detail::put_le_double(out, v);
  } else {
    for (double v : f.values()) {
      out += detail::format_real(v);
      out.push_back('\n');
    }
  }
  return out;
}

inline Field decode_field(const std::string& bytes, FieldFormat format = FieldFormat::Auto) {
  const auto eol = bytes.find('\n');
  if (eol == std::string::npos) throw InvalidArgument("field dump has no header line");
  const GridSpec g = detail::parse_field_header(bytes.substr(0, eol));
  const std::size_t count = g.size();
  const std::size_t body = bytes.size() - eol - 1;

  if (format == FieldFormat::Auto) {
    format = FieldFormat::Text;
    if (body == 8 * count) {
      const auto is_text = [](unsigned char c) {
        return std::isdigit(c) || std::isspace(c) || c == '.' || c == '-' || c == '+' || c == 'e' ||
               c == 'E';
      };
      for (std::size_t i = eol + 1; i < bytes.size(); ++i) {
        if (!is_text(static_cast<unsigned char>(bytes[i]))) {
          format = FieldFormat::Binary;
          break;
        }
      }
    }
  }

  std::vector<double> values;
  values.reserve(count);
  if (format == FieldFormat::Binary) {
    if (body != 8 * count) {
      throw InvalidArgument("binary field dump has " + std::to_string(body) + " payload bytes, expected " +
                            std::to_string(8 * count));
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + eol + 1);
    for (std::size_t i = 0; i < count; ++i) values.push_back(detail::get_le_double(p + 8 * i));
  } else {
    std::istringstream in(bytes.substr(eol + 1));
    std::string token;
    while (in >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw InvalidArgument("bad value '" + token + "' in field dump");
      }
    }
    if (values.size() != count) {
      throw InvalidArgument("field dump has " + std::to_string(values.size()) + " values, header implies " +
                            std::to_string(count));
    }
  }
  return Field(g, std::move(values));
}

inline void save_field(const std::filesystem::path& path, const Field& f,
                       FieldFormat format = FieldFormat::Text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const auto bytes = encode_field(f, format);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

inline Field load_field(const std::filesystem::path& path, FieldFormat format = FieldFormat::Auto) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open field dump " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_field(bytes, format);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

}  // namespace triwave
