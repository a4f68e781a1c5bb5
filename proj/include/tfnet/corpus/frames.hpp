#ifndef TFNET_CORPUS_FRAMES_HPP
#define TFNET_CORPUS_FRAMES_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::corpus {

// Frame Archive: one directory per entry holding "header.txt" (magic
// "TFNF", version, then T C H W, all decimal text) and one raw frame
// file per time step, zero-padded index, H*W*C bytes each (row-major
// y, x, channel). Round trips bit-exactly.
struct FrameArchive {
  long t = 0, c = 0, h = 0, w = 0;
  std::vector<std::vector<std::uint8_t>> frames;

  long frame_bytes() const { return h * w * c; }
};

inline std::string frame_file_name(long index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06ld.raw", index);
  return buf;
}

inline void write_frame_archive(const std::string& dir, const FrameArchive& a) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create frame dir '" + dir + "': " + ec.message());
  {
    std::ofstream hdr(dir + "/header.txt", std::ios::binary);
    if (!hdr) throw IoError("cannot write header in '" + dir + "'");
    hdr << "TFNF 1\n" << a.t << " " << a.c << " " << a.h << " " << a.w << "\n";
  }
  if (static_cast<long>(a.frames.size()) != a.t)
    throw IoError("frame archive: frame list does not match T");
  for (long i = 0; i < a.t; ++i) {
    const auto& f = a.frames[static_cast<size_t>(i)];
    if (static_cast<long>(f.size()) != a.frame_bytes())
      throw IoError("frame archive: frame " + std::to_string(i) + " wrong size");
    std::ofstream out(dir + "/" + frame_file_name(i), std::ios::binary);
    if (!out) throw IoError("cannot write frame file in '" + dir + "'");
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size()));
    if (!out) throw IoError("short write in '" + dir + "'");
  }
}

inline FrameArchive read_frame_archive(const std::string& dir) {
  FrameArchive a;
  std::ifstream hdr(dir + "/header.txt", std::ios::binary);
  if (!hdr) throw IoError("cannot open frame archive header in '" + dir + "'");
  std::string magic;
  long version = 0;
  hdr >> magic >> version >> a.t >> a.c >> a.h >> a.w;
  if (!hdr || magic != "TFNF")
    throw ParseError("frame archive '" + dir + "': bad header");
  if (version != 1)
    throw ParseError("frame archive '" + dir + "': unsupported version " +
                     std::to_string(version));
  if (a.t < 1 || a.c < 1 || a.h < 1 || a.w < 1)
    throw ParseError("frame archive '" + dir + "': bad dimensions");
  a.frames.resize(static_cast<size_t>(a.t));
  for (long i = 0; i < a.t; ++i) {
    const std::string path = dir + "/" + frame_file_name(i);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("missing frame file '" + path + "'");
    auto& f = a.frames[static_cast<size_t>(i)];
    f.resize(static_cast<size_t>(a.frame_bytes()));
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(f.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.size()))
      throw IoError("short read from '" + path + "'");
  }
  return a;
}

// Frames as a T x C x H x W tensor with pixels scaled to [0,1].
template <class Real>
Tensor<Real> to_video_tensor(const FrameArchive& a) {
  Tensor<Real> v({a.t, a.c, a.h, a.w});
  const Real scale = Real(1) / Real(255);
  for (long t = 0; t < a.t; ++t) {
    const std::uint8_t* src = a.frames[static_cast<size_t>(t)].data();
    // frame bytes are y,x,c; tensor is c,y,x per frame
    for (long y = 0; y < a.h; ++y)
      for (long x = 0; x < a.w; ++x)
        for (long c = 0; c < a.c; ++c)
          v.at(t, c, y, x) = static_cast<Real>(src[(y * a.w + x) * a.c + c]) * scale;
  }
  return v;
}

}  // namespace tfnet::corpus

#endif  // TFNET_CORPUS_FRAMES_HPP
