#include "msort/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msort {
namespace {

void write_pgm16(const std::vector<std::uint16_t>& pixels, int width, int height,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P5\n" << width << ' ' << height << "\n65535\n";
  for (std::uint16_t v : pixels) {
    // Big-endian sample order per the graymap convention.
    const unsigned char hi = static_cast<unsigned char>(v >> 8);
    const unsigned char lo = static_cast<unsigned char>(v & 0xff);
    out.put(static_cast<char>(hi));
    out.put(static_cast<char>(lo));
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::uint16_t> read_pgm16(const std::string& path, int& width, int& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (!in || magic != "P5") throw IoError(path + ": not a P5 graymap");
  if (maxval != 65535) throw IoError(path + ": maxval must be 65535");
  if (width <= 0 || height <= 0) throw IoError(path + ": bad dimensions");
  in.get();  // single whitespace after the header
  std::vector<std::uint16_t> pixels(static_cast<size_t>(width) * height);
  std::vector<char> buf(pixels.size() * 2);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw IoError(path + ": truncated pixel data");
  for (size_t i = 0; i < pixels.size(); ++i)
    pixels[i] = static_cast<std::uint16_t>(
        (static_cast<unsigned char>(buf[2 * i]) << 8) |
        static_cast<unsigned char>(buf[2 * i + 1]));
  return pixels;
}

void export_map(const std::vector<double>& map, int n, const std::string& path,
                Normalization norm) {
  std::vector<std::uint16_t> pixels(map.size(), 0);
  if (norm == Normalization::kPeak) {
    const double peak = map.empty() ? 0.0 : *std::max_element(map.begin(), map.end());
    if (peak > 0.0)
      for (size_t i = 0; i < map.size(); ++i)
        pixels[i] = static_cast<std::uint16_t>(
            std::lround(std::clamp(map[i] / peak, 0.0, 1.0) * 65535.0));
  } else {
    double total = 0.0;
    for (double v : map) total += v;
    if (total > 0.0)
      for (size_t i = 0; i < map.size(); ++i)
        pixels[i] = static_cast<std::uint16_t>(
            std::lround(std::clamp(map[i] / total, 0.0, 1.0) * 65535.0));
  }
  write_pgm16(pixels, n, n, path);
}

}  // namespace

void save_hologram(const PhaseElement& e, const std::string& path,
                   double wavelength, std::uint64_t seed) {
  std::vector<std::uint16_t> pixels(e.phases.size());
  for (size_t i = 0; i < pixels.size(); ++i) {
    // Nearest level, clamped so phases just below 2pi stay at 65535 instead
    // of wrapping to 0; quantized values are exact fixed points of a reload.
    long v = std::lround(e.phases[i] / kTwoPi * 65536.0);
    pixels[i] = static_cast<std::uint16_t>(std::clamp(v, 0L, 65535L));
  }
  write_pgm16(pixels, e.m, e.m, path);

  std::ofstream meta(path + ".meta");
  if (!meta) throw IoError("cannot open " + path + ".meta for writing");
  char buf[64];
  meta << "m " << e.m << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", e.macro_pitch);
  meta << "macro_pitch " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", wavelength);
  meta << "wavelength " << buf << '\n';
  meta << "seed " << seed << '\n';
  if (!meta) throw IoError("write failed for " + path + ".meta");
}

PhaseElement load_hologram(const std::string& path) {
  std::ifstream meta(path + ".meta");
  if (!meta) throw IoError("cannot open sidecar " + path + ".meta");
  int m = 0;
  double macro_pitch = 0.0, wavelength = 0.0;
  std::uint64_t seed = 0;
  std::string key;
  while (meta >> key) {
    if (key == "m") meta >> m;
    else if (key == "macro_pitch") meta >> macro_pitch;
    else if (key == "wavelength") meta >> wavelength;
    else if (key == "seed") meta >> seed;
    else throw IoError(path + ".meta: unknown key '" + key + "'");
  }
  if (m < 16 || macro_pitch <= 0.0) throw IoError(path + ".meta: invalid metadata");

  int width = 0, height = 0;
  const auto pixels = read_pgm16(path, width, height);
  if (width != m || height != m)
    throw IoError(path + ": image size does not match sidecar m=" + std::to_string(m));
  PhaseElement e(m, macro_pitch);
  for (size_t i = 0; i < pixels.size(); ++i)
    e.phases[i] = kTwoPi * pixels[i] / 65536.0;
  return e;
}

void export_intensity(const ComplexField& f, const std::string& path,
                      Normalization norm) {
  export_map(intensity(f), f.grid.n, path, norm);
}

void export_intensity_map(const std::vector<double>& map, int n,
                          const std::string& path, Normalization norm) {
  export_map(map, n, path, norm);
}

void write_crosstalk_csv(const SortMetrics& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const int d = metrics.d;
  const std::vector<double> norm = crosstalk_normalized(metrics);
  out << "input";
  for (int m = 0; m < d; ++m) out << ",channel_" << m;
  out << '\n';
  char buf[64];
  for (int n = 0; n < d; ++n) {
    out << "mode_" << n;
    for (int m = 0; m < d; ++m) {
      std::snprintf(buf, sizeof buf, ",%.6f", norm[static_cast<size_t>(n) * d + m]);
      out << buf;
    }
    out << '\n';
  }
  auto footer = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%s,%.6f\n", name, v);
    out << buf;
  };
  footer("ability", metrics.ability);
  footer("efficiency", metrics.mean_efficiency);
  footer("e_b", metrics.e_b);
  footer("R", metrics.R);
  footer("B", metrics.B);
  if (!out) throw IoError("write failed for " + path);
}

void write_raw_csv(const SortMetrics& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const int d = metrics.d;
  out << "input";
  for (int m = 0; m < d; ++m) out << ",channel_" << m;
  out << '\n';
  char buf[64];
  for (int n = 0; n < d; ++n) {
    out << "mode_" << n;
    for (int m = 0; m < d; ++m) {
      std::snprintf(buf, sizeof buf, ",%.9e", metrics.raw_at(n, m));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace msort
