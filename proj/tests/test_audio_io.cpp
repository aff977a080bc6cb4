#include <cstring>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "roomac/audio_io.hpp"
#include "roomac/room_acoustics.hpp"

using namespace roomac;
using test_helpers::TempDir;

namespace {

// Quantize to float32 so WAV round trips are bit-exact.
std::vector<double> as_float32(std::vector<double> v) {
  for (double& x : v) x = static_cast<double>(static_cast<float>(x));
  return v;
}

void write_pcm16_wav(const std::string& path, const std::vector<std::int16_t>& samples,
                     int channels, int rate) {
  std::string out;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  auto u16 = [&](std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);
  out += "RIFF";
  u32(36 + data_size);
  out += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * 2));
  u16(static_cast<std::uint16_t>(channels * 2));
  u16(16);
  out += "data";
  u32(data_size);
  for (std::int16_t s : samples) u16(static_cast<std::uint16_t>(s));
  std::ofstream os(path, std::ios::binary);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace

TEST_SUITE("audio_io") {

TEST_CASE("pcm16 read: sample count, rate and scaling convention") {
  TempDir dir("wav16");
  std::vector<std::int16_t> samples(48000, 0);
  samples[0] = 32767;
  samples[1] = -32768;
  write_pcm16_wav(dir.str("t.wav"), samples, 1, 48000);

  const Signal s = audio::read_wav(dir.str("t.wav"));
  CHECK(s.channel_count() == 1);
  CHECK(s.length() == 48000);
  CHECK(s.sample_rate == 48000);
  CHECK(s.channels[0][0] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-12));
  CHECK(s.channels[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("three-channel file is rejected") {
  TempDir dir("wav3ch");
  std::vector<std::int16_t> samples(300, 100);
  write_pcm16_wav(dir.str("t.wav"), samples, 3, 48000);
  CHECK_THROWS_WITH_AS(audio::read_wav(dir.str("t.wav")),
                       doctest::Contains("unsupported channel count"), std::invalid_argument);
}

TEST_CASE("float wav round trip is bit-exact") {
  TempDir dir("wavrt");
  const auto noise = as_float32(test_helpers::random_vector(48000, 11));
  SUBCASE("mono") {
    const Signal s = make_mono(noise, 48000);
    audio::write_wav(s, dir.str("m.wav"));
    const Signal back = audio::read_wav(dir.str("m.wav"));
    REQUIRE(back.length() == s.length());
    CHECK(back.channels[0] == s.channels[0]);
  }
  SUBCASE("stereo") {
    const auto right = as_float32(test_helpers::random_vector(48000, 12));
    const Signal s = make_stereo(noise, right, 44100);
    audio::write_wav(s, dir.str("s.wav"));
    const Signal back = audio::read_wav(dir.str("s.wav"));
    REQUIRE(back.channel_count() == 2);
    CHECK(back.sample_rate == 44100);
    CHECK(back.channels[0] == s.channels[0]);
    CHECK(back.channels[1] == s.channels[1]);
  }
}

TEST_CASE("write to unwritable path fails") {
  const Signal s = make_mono({0.1, 0.2}, 48000);
  CHECK_THROWS_AS(audio::write_wav(s, "/nonexistent_dir_roomac/x.wav"), std::runtime_error);
}

TEST_CASE("zero-length and unreadable files are rejected") {
  TempDir dir("wavbad");
  CHECK_THROWS_AS(audio::read_wav(dir.str("missing.wav")), std::runtime_error);
  std::vector<std::int16_t> none;
  write_pcm16_wav(dir.str("empty.wav"), none, 1, 48000);
  CHECK_THROWS_WITH_AS(audio::read_wav(dir.str("empty.wav")),
                       doctest::Contains("zero-length"), std::invalid_argument);
}

TEST_CASE("convolution with a unit impulse is the identity") {
  const auto dry = test_helpers::random_vector(500, 21);
  ImpulseResponse delta{make_mono({1.0, 0.0, 0.0}, 48000), "delta"};
  const Signal out = audio::convolve(make_mono(dry, 48000), delta);
  REQUIRE(out.length() == 502);
  for (std::size_t i = 0; i < dry.size(); ++i)
    CHECK(out.channels[0][i] == doctest::Approx(dry[i]).epsilon(1e-12));
  CHECK(out.channels[0][500] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("convolution with a scaled delayed impulse shifts and scales") {
  const auto dry = test_helpers::random_vector(400, 22);
  std::vector<double> ir(150, 0.0);
  ir[100] = 0.5;
  const Signal out = audio::convolve(make_mono(dry, 48000), {make_mono(ir, 48000), "d100"});
  REQUIRE(out.length() == 549);
  for (std::size_t i = 0; i < dry.size(); ++i)
    CHECK(out.channels[0][i + 100] == doctest::Approx(0.5 * dry[i]).epsilon(1e-10));
}

TEST_CASE("fast convolution matches the direct time-domain oracle") {
  const auto dry = test_helpers::random_vector(1000, 23);
  const auto ir = test_helpers::random_vector(300, 24);
  const Signal out = audio::convolve(make_mono(dry, 48000), {make_mono(ir, 48000), "rand"});
  const auto want = test_helpers::direct_convolve(dry, ir);
  REQUIRE(out.length() == want.size());
  CHECK(test_helpers::max_rel_error(out.channels[0], want) < 1e-9);
}

TEST_CASE("convolution is linear and length is N+M-1") {
  std::mt19937_64 rng(25);
  std::uniform_int_distribution<std::size_t> n_dist(2, 700), m_dist(2, 300);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = n_dist(rng), m = m_dist(rng);
    const auto x = test_helpers::random_vector(n, 100 + trial);
    const auto y = test_helpers::random_vector(n, 200 + trial);
    const auto h = test_helpers::random_vector(m, 300 + trial);
    const double a = 0.7, b = -1.3;
    std::vector<double> combo(n);
    for (std::size_t i = 0; i < n; ++i) combo[i] = a * x[i] + b * y[i];
    ImpulseResponse ir{make_mono(h, 48000), "h"};
    const auto lhs = audio::convolve(make_mono(combo, 48000), ir).channels[0];
    const auto cx = audio::convolve(make_mono(x, 48000), ir).channels[0];
    const auto cy = audio::convolve(make_mono(y, 48000), ir).channels[0];
    REQUIRE(lhs.size() == n + m - 1);
    std::vector<double> rhs(lhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * cx[i] + b * cy[i];
    CHECK(test_helpers::max_rel_error(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("convolution contract violations") {
  const Signal dry = make_mono(test_helpers::random_vector(100, 26), 48000);
  SUBCASE("sample-rate mismatch") {
    ImpulseResponse ir{make_mono({1.0, 0.5}, 44100), "x"};
    CHECK_THROWS_WITH_AS(audio::convolve(dry, ir), doctest::Contains("sample-rate"),
                         std::invalid_argument);
  }
  SUBCASE("non-mono dry input") {
    const Signal stereo = make_stereo({0.1, 0.2}, {0.3, 0.4}, 48000);
    ImpulseResponse ir{make_mono({1.0}, 48000), "x"};
    CHECK_THROWS_AS(audio::convolve(stereo, ir), std::invalid_argument);
  }
}

TEST_CASE("binaural convolution applies each IR channel") {
  const auto dry = test_helpers::random_vector(256, 27);
  const auto left = test_helpers::random_vector(64, 28);
  const auto right = test_helpers::random_vector(64, 29);
  const Signal out =
      audio::convolve(make_mono(dry, 48000), {make_stereo(left, right, 48000), "bin"});
  REQUIRE(out.channel_count() == 2);
  CHECK(test_helpers::max_rel_error(out.channels[0], test_helpers::direct_convolve(dry, left)) <
        1e-9);
  CHECK(test_helpers::max_rel_error(out.channels[1], test_helpers::direct_convolve(dry, right)) <
        1e-9);
}

TEST_CASE("synthetic exponential IR is deterministic per seed") {
  const auto a = audio::synth_exponential_ir(0.5, 0.6, 48000, 77);
  const auto b = audio::synth_exponential_ir(0.5, 0.6, 48000, 77);
  const auto c = audio::synth_exponential_ir(0.5, 0.6, 48000, 78);
  CHECK(a.signal.channels[0] == b.signal.channels[0]);
  CHECK(a.signal.channels[0] != c.signal.channels[0]);
}

TEST_CASE("synthetic IR decays 60 dB per t60") {
  const double t60 = 1.5;
  const auto ir = audio::synth_exponential_ir(t60, 1.6, 48000, 5);
  const auto curve = room::schroeder_decay(ir.signal);
  // Time of the -60 dB crossing.
  std::size_t i = 0;
  while (i < curve.level_db.size() && curve.level_db[i] > -60.0) ++i;
  REQUIRE(i < curve.level_db.size());
  CHECK(curve.times[i] == doctest::Approx(t60).epsilon(0.02));
}

TEST_CASE("synthetic IR half-energy ratio matches the analytic envelope integral") {
  const double t60 = 1.5;
  const auto ir = audio::synth_exponential_ir(t60, t60, 48000, 6);
  const auto& x = ir.signal.channels[0];
  const std::size_t half = x.size() / 2;
  double first = 0, second = 0;
  for (std::size_t i = 0; i < half; ++i) first += x[i] * x[i];
  for (std::size_t i = half; i < x.size(); ++i) second += x[i] * x[i];
  // With energy envelope exp(-a t), a = 6 ln10 / t60:
  // ratio = (1 - 10^-3) / (10^-3 - 10^-6).
  const double expected = (1.0 - 1e-3) / (1e-3 - 1e-6);
  CHECK(first / second == doctest::Approx(expected).epsilon(0.05));
}

}  // TEST_SUITE
