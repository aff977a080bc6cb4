#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "roomac/audio_io.hpp"

namespace roomac::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      std::uint32_t u = read_u32(p);
      float f;
      std::memcpy(&f, &u, 4);
      return static_cast<double>(f);
    }
    throw std::invalid_argument("unsupported float WAV bit depth: " + std::to_string(bits));
  }
  switch (bits) {
    case 16: {
      std::int16_t v = static_cast<std::int16_t>(read_u16(p));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: {
      std::int32_t v = static_cast<std::int32_t>(read_u32(p));
      return v / 2147483648.0;
    }
    default:
      throw std::invalid_argument("unsupported PCM bit depth: " + std::to_string(bits));
  }
}

}  // namespace

Signal read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    std::uint32_t size = read_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + size > bytes.size()) size = static_cast<std::uint32_t>(bytes.size() - pos);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw std::runtime_error("malformed fmt chunk");
      format = read_u16(bytes.data() + pos);
      channels = read_u16(bytes.data() + pos + 2);
      rate = read_u32(bytes.data() + pos + 4);
      bits = read_u16(bytes.data() + pos + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw std::runtime_error("malformed extensible fmt chunk");
        format = read_u16(bytes.data() + pos + 24);  // first 2 bytes of SubFormat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_size = size;
    }
    pos += size + (size & 1);  // chunks are word aligned
  }

  if (!have_fmt || data == nullptr) throw std::runtime_error("missing fmt or data chunk: " + path);
  if (format != kFormatPcm && format != kFormatFloat)
    throw std::invalid_argument("unsupported WAV format code: " + std::to_string(format));
  if (channels == 0 || channels > 2)
    throw std::invalid_argument("unsupported channel count: " + std::to_string(channels));
  if (rate == 0) throw std::runtime_error("invalid sample rate");
  const std::size_t bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0) throw std::runtime_error("invalid bit depth");
  const std::size_t frames = data_size / (bytes_per_sample * channels);
  if (frames == 0) throw std::invalid_argument("zero-length audio: " + path);

  Signal s;
  s.sample_rate = static_cast<int>(rate);
  s.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f)
    for (std::uint16_t c = 0; c < channels; ++c)
      s.channels[c][f] = decode_sample(data + (f * channels + c) * bytes_per_sample, format, bits);
  s.validate();
  return s;
}

void write_wav(const Signal& signal, const std::string& path) {
  signal.validate();
  const std::uint16_t channels = static_cast<std::uint16_t>(signal.channel_count());
  const std::uint32_t frames = static_cast<std::uint32_t>(signal.length());
  const std::uint32_t data_size = frames * channels * 4;

  std::string out;
  out.reserve(data_size + 64);
  out.append("RIFF");
  put_u32(out, 4 + (8 + 18) + (8 + 4) + (8 + data_size));
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 18);
  put_u16(out, kFormatFloat);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate) * channels * 4);  // byte rate
  put_u16(out, static_cast<std::uint16_t>(channels * 4));                       // block align
  put_u16(out, 32);
  put_u16(out, 0);  // cbSize
  out.append("fact");
  put_u32(out, 4);
  put_u32(out, frames);
  out.append("data");
  put_u32(out, data_size);
  for (std::uint32_t f = 0; f < frames; ++f) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      float v = static_cast<float>(signal.channels[c][f]);
      std::uint32_t u;
      std::memcpy(&u, &v, 4);
      put_u32(out, u);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace roomac::audio
