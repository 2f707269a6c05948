// Copyright 2026 The ttakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "ttakit/error.hpp"
#include "ttakit/image.hpp"

namespace ttakit {

namespace detail {

// Skips whitespace and '#' comments between header tokens.
inline void skip_ppm_space(std::istream& in) {
  for (;;) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (ch != std::char_traits<char>::eof() && std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_ppm_int(std::istream& in, const char* field) {
  skip_ppm_space(in);
  int value = 0;
  if (!(in >> value)) throw FormatError(std::string("PPM header: bad ") + field);
  return value;
}

}  // namespace detail

/// Binary PPM (P6) with maxval 255.
inline Image read_ppm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '6') {
    throw FormatError("not a binary PPM (expected P6 magic)");
  }
  const int w = detail::read_ppm_int(in, "width");
  const int h = detail::read_ppm_int(in, "height");
  const int maxval = detail::read_ppm_int(in, "maxval");
  if (w < 1 || h < 1) throw FormatError("PPM header: non-positive dimensions");
  if (maxval != 255) throw FormatError("PPM maxval must be 255, got " + std::to_string(maxval));
  if (!std::isspace(in.get())) throw FormatError("PPM header: missing separator before raster");
  std::vector<std::uint8_t> raster(static_cast<std::size_t>(w) * h * Image::kChannels);
  if (!in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()))) {
    throw FormatError("PPM raster truncated");
  }
  return Image(w, h, std::move(raster));
}

inline void write_ppm(std::ostream& out, const Image& img) {
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  const auto s = img.samples();
  out.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size()));
}

inline Image read_ppm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_ppm(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_ppm_file(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  write_ppm(out, img);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace ttakit
