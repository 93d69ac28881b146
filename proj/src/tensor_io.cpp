#include "tensorord/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace tensorord {

namespace {

constexpr std::array<char, 4> kMagic{'T', 'O', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

void read_exact(std::istream& in, char* dst, std::size_t count, const char* what) {
  in.read(dst, static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) throw FormatError(std::string("TOF1: truncated ") + what);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), b.size(), "header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_tof1(std::ostream& out, const Tensor& t) {
  if (t.order() > std::numeric_limits<std::uint8_t>::max()) throw ArgumentError("TOF1: order exceeds 255");
  out.write(kMagic.data(), kMagic.size());
  const auto order = static_cast<char>(static_cast<std::uint8_t>(t.order()));
  out.write(&order, 1);
  for (auto d : t.dims()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) throw ArgumentError("TOF1: dimension exceeds u32");
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (double x : t.data()) put_f64(out, x);
  if (!out) throw std::runtime_error("TOF1: write failed");
}

Tensor read_tof1(std::istream& in) {
  std::array<char, 4> magic{};
  read_exact(in, magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw FormatError("TOF1: bad magic bytes");
  char order_byte = 0;
  read_exact(in, &order_byte, 1, "header");
  const auto order = static_cast<std::uint8_t>(order_byte);
  if (order == 0) throw FormatError("TOF1: order must be at least 1");
  Dims dims(order);
  for (auto& d : dims) {
    d = get_u32(in);
    if (d == 0) throw FormatError("TOF1: zero dimension");
  }
  const std::size_t count = element_count(dims);
  std::vector<char> raw(count * 8);
  read_exact(in, raw.data(), raw.size(), "payload");
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i * 8 + static_cast<std::size_t>(b)])) << (8 * b);
    data[i] = std::bit_cast<double>(bits);
  }
  try {
    return Tensor(std::move(dims), std::move(data));
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("TOF1: ") + e.what());
  }
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_tof1(out, t);
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_tof1(in);
}

Tensor stack_sample(const TensorSample& sample) {
  Dims dims{sample.size()};
  dims.insert(dims.end(), sample.dims().begin(), sample.dims().end());
  std::vector<double> data;
  data.reserve(element_count(dims));
  for (const auto& x : sample.observations()) data.insert(data.end(), x.data().begin(), x.data().end());
  return Tensor(std::move(dims), std::move(data));
}

TensorSample unstack_sample(const Tensor& stacked) {
  if (stacked.order() < 2) throw FormatError("sample file must hold a tensor of order >= 2");
  const std::size_t n = stacked.dim(0);
  const Dims dims(stacked.dims().begin() + 1, stacked.dims().end());
  const std::size_t each = element_count(dims);
  std::vector<Tensor> obs;
  obs.reserve(n);
  const auto data = stacked.data();
  for (std::size_t i = 0; i < n; ++i)
    obs.emplace_back(dims, std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(i * each),
                                               data.begin() + static_cast<std::ptrdiff_t>((i + 1) * each)));
  return TensorSample(std::move(obs));
}

void save_sample(const std::filesystem::path& path, const TensorSample& sample) {
  save_tensor(path, stack_sample(sample));
}

TensorSample load_sample(const std::filesystem::path& path) { return unstack_sample(load_tensor(path)); }

}  // namespace tensorord
