#include "image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "error.hpp"

namespace silhuetta {

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

RgbImage::RgbImage(int w, int h)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

BinaryMask::BinaryMask(int w, int h, bool fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

namespace {

struct PnmHeader {
  char kind = 0;  // '5' or '6'
  int width = 0, height = 0, maxval = 0;
};

// Reads one header integer, skipping whitespace and '#' comments.
int read_header_int(std::istream& in, const std::string& name) {
  int c = in.peek();
  while (c != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string discard;
      std::getline(in, discard);
    } else {
      break;
    }
    c = in.peek();
  }
  int value = 0;
  if (!(in >> value)) throw Error(ErrorCode::ParseError, name + ": malformed PNM header");
  return value;
}

PnmHeader read_header(std::istream& in, const std::string& name) {
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw Error(ErrorCode::ParseError, name + ": not a binary PGM/PPM file");
  PnmHeader h;
  h.kind = magic[1];
  h.width = read_header_int(in, name);
  h.height = read_header_int(in, name);
  h.maxval = read_header_int(in, name);
  if (h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 255)
    throw Error(ErrorCode::ParseError, name + ": unsupported PNM dimensions or maxval");
  // exactly one whitespace byte separates the header from the raster
  if (!std::isspace(in.get())) throw Error(ErrorCode::ParseError, name + ": malformed PNM header");
  return h;
}

std::vector<std::uint8_t> read_raster(std::istream& in, std::size_t n, const std::string& name) {
  std::vector<std::uint8_t> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw Error(ErrorCode::ParseError, name + ": truncated raster");
  return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

void write_pnm(const std::filesystem::path& path, char kind, int w, int h,
               const std::vector<std::uint8_t>& raster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << 'P' << kind << '\n' << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto h = read_header(in, path.string());
  if (h.kind != '5') throw Error(ErrorCode::ParseError, path.string() + ": expected P5");
  GrayImage img;
  img.width = h.width;
  img.height = h.height;
  img.data = read_raster(in, static_cast<std::size_t>(h.width) * h.height, path.string());
  return img;
}

RgbImage read_color_image(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto h = read_header(in, path.string());
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  RgbImage img;
  img.width = h.width;
  img.height = h.height;
  if (h.kind == '6') {
    img.data = read_raster(in, n * 3, path.string());
  } else {
    const auto gray = read_raster(in, n, path.string());
    img.data.resize(n * 3);
    for (std::size_t i = 0; i < n; ++i)
      img.data[3 * i] = img.data[3 * i + 1] = img.data[3 * i + 2] = gray[i];
  }
  return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  write_pnm(path, '5', img.width, img.height, img.data);
}

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
  write_pnm(path, '6', img.width, img.height, img.data);
}

void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> raster(mask.data.size());
  std::transform(mask.data.begin(), mask.data.end(), raster.begin(),
                 [](std::uint8_t b) { return b ? std::uint8_t{255} : std::uint8_t{0}; });
  write_pnm(path, '5', mask.width, mask.height, raster);
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  const GrayImage g = read_pgm(path);
  BinaryMask m(g.width, g.height);
  for (std::size_t i = 0; i < g.data.size(); ++i) m.data[i] = g.data[i] ? 1 : 0;
  return m;
}

}  // namespace silhuetta
