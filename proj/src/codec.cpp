#include "satvec/codec.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include <jpeglib.h>

#include "satvec/error.hpp"

namespace satvec {

std::string_view format_name(ImageFormat f) {
  switch (f) {
    case ImageFormat::png: return "png";
    case ImageFormat::jpeg: return "jpeg";
    case ImageFormat::ppm: return "ppm";
    case ImageFormat::pgm: return "pgm";
  }
  return "unknown";
}

std::optional<ImageFormat> format_from_name(std::string_view name) {
  if (name == "png") return ImageFormat::png;
  if (name == "jpeg" || name == "jpg") return ImageFormat::jpeg;
  if (name == "ppm") return ImageFormat::ppm;
  if (name == "pgm") return ImageFormat::pgm;
  return std::nullopt;
}

std::optional<ImageFormat> format_from_code(std::uint16_t code) {
  if (code >= 1 && code <= 4) return static_cast<ImageFormat>(code);
  return std::nullopt;
}

namespace {

constexpr std::uint8_t png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_pnm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::optional<ImageFormat> detect_format(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_magic, 8) == 0) return ImageFormat::png;
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return ImageFormat::jpeg;
  if (bytes.size() >= 3 && bytes[0] == 'P' && is_pnm_space(bytes[2])) {
    if (bytes[1] == '6') return ImageFormat::ppm;
    if (bytes[1] == '5') return ImageFormat::pgm;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// PNG

namespace {

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(Errc::corrupt_stream, std::string("png: ") + image.message);
  }
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw Error(Errc::zero_dimension, "png");
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::corrupt_stream, "png: " + msg);
  }
  return RgbImage(image.width, image.height, std::move(pixels));
}

std::vector<std::uint8_t> write_png(std::uint32_t w, std::uint32_t h, std::uint32_t format,
                                    const std::uint8_t* pixels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = w;
  image.height = h;
  image.format = format;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
    throw Error(Errc::io, std::string("png encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
    throw Error(Errc::io, std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  return write_png(img.width(), img.height(), PNG_FORMAT_RGB, img.data().data());
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  return write_png(img.width(), img.height(), PNG_FORMAT_GRAY, img.data().data());
}

// ---------------------------------------------------------------------------
// JPEG. libjpeg reports errors through longjmp, so nothing with a
// destructor may be created between setjmp and the end of each function.

namespace {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

extern "C" void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

extern "C" void jpeg_silent(j_common_ptr, int) {}

RgbImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silent;
  err.message[0] = '\0';
  std::vector<std::uint8_t> pixels;
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(Errc::corrupt_stream, std::string("jpeg: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = cinfo.output_width;
  height = cinfo.output_height;
  if (width == 0 || height == 0 || cinfo.output_components != 3) {
    jpeg_destroy_decompress(&cinfo);
    if (width == 0 || height == 0) throw Error(Errc::zero_dimension, "jpeg");
    throw Error(Errc::unsupported_format, "jpeg: unexpected component count");
  }
  pixels.resize(std::size_t{width} * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + std::size_t{cinfo.output_scanline} * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return RgbImage(width, height, std::move(pixels));
}

}  // namespace

std::vector<std::uint8_t> encode_jpeg(const RgbImage& img, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silent;
  err.message[0] = '\0';
  unsigned char* buffer = nullptr;
  unsigned long size = 0;

  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw Error(Errc::io, std::string("jpeg encode: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = img.width();
  cinfo.image_height = img.height();
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const auto* base = img.data().data();
  while (cinfo.next_scanline < cinfo.image_height) {
    auto row = const_cast<JSAMPROW>(base + std::size_t{cinfo.next_scanline} * img.width() * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<std::uint8_t> out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

// ---------------------------------------------------------------------------
// Binary PNM (P5 / P6)

namespace {

class PnmHeaderReader {
public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes), pos_(2) {}

  std::uint64_t next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      throw Error(Errc::corrupt_stream, "pnm: malformed header");
    }
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 0xFFFFFFFFull) throw Error(Errc::corrupt_stream, "pnm: header value too large");
    }
    return v;
  }

  /// Position of the first raster byte: exactly one whitespace after maxval.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !is_pnm_space(bytes_[pos_])) {
      throw Error(Errc::corrupt_stream, "pnm: missing separator before raster");
    }
    return pos_ + 1;
  }

private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_pnm_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

RgbImage decode_pnm(std::span<const std::uint8_t> bytes, bool color) {
  PnmHeaderReader reader(bytes);
  const auto width = reader.next_number();
  const auto height = reader.next_number();
  const auto maxval = reader.next_number();
  if (width == 0 || height == 0) {
    throw Error(Errc::zero_dimension, "pnm: " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (maxval == 0) throw Error(Errc::corrupt_stream, "pnm: maxval 0");
  if (maxval > 255) throw Error(Errc::unsupported_format, "pnm: 16-bit samples");

  const std::size_t start = reader.raster_start();
  const std::size_t channels = color ? 3 : 1;
  const std::size_t needed = width * height * channels;
  if (bytes.size() - std::min(start, bytes.size()) < needed) {
    throw Error(Errc::corrupt_stream, "pnm: raster truncated");
  }
  auto raster = bytes.subspan(start, needed);

  std::vector<std::uint8_t> rgb(width * height * 3);
  for (std::size_t i = 0; i < width * height; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      std::uint32_t v = raster[color ? 3 * i + c : i];
      if (v > maxval) throw Error(Errc::corrupt_stream, "pnm: sample exceeds maxval");
      if (maxval != 255) v = (v * 255 + static_cast<std::uint32_t>(maxval) / 2) / static_cast<std::uint32_t>(maxval);
      rgb[3 * i + c] = static_cast<std::uint8_t>(v);
    }
  }
  return RgbImage(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height), std::move(rgb));
}

std::vector<std::uint8_t> write_pnm(char kind, std::uint32_t w, std::uint32_t h,
                                    std::span<const std::uint8_t> raster) {
  const std::string header = std::string("P") + kind + "\n" + std::to_string(w) + " " +
                             std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  return write_pnm('6', img.width(), img.height(), img.data());
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  return write_pnm('5', img.width(), img.height(), img.data());
}

RgbImage decode_image(std::span<const std::uint8_t> bytes, std::optional<ImageFormat> hint) {
  const auto detected = detect_format(bytes);
  if (!detected) throw Error(Errc::unsupported_format, "unrecognized magic bytes");
  if (hint && *hint != *detected) {
    throw Error(Errc::unsupported_format, "stream is " + std::string(format_name(*detected)) +
                                              ", expected " + std::string(format_name(*hint)));
  }
  switch (*detected) {
    case ImageFormat::png: return decode_png(bytes);
    case ImageFormat::jpeg: return decode_jpeg(bytes);
    case ImageFormat::ppm: return decode_pnm(bytes, true);
    case ImageFormat::pgm: return decode_pnm(bytes, false);
  }
  throw Error(Errc::unsupported_format, "unreachable");
}

}  // namespace satvec
