#include "dicausal/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "dicausal/errors.hpp"

namespace dicausal {
namespace {

constexpr std::array<char, 4> kMagic = {'D', 'C', 'D', '1'};
constexpr std::uint64_t kMaxRank = 8;

template <typename T>
void put(std::string& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(bytes.data(), bytes.size());
}

class Reader {
 public:
  Reader(std::string bytes, std::string origin) : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

  template <typename T>
  T get() {
    std::array<char, sizeof(T)> raw;
    take(raw.data(), raw.size());
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
  }

  std::string text(std::uint64_t n) {
    if (n > remaining()) fail("length field exceeds file size");
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(const std::string& why) const {
    throw CheckpointCorruptError("corrupt checkpoint " + origin_ + ": " + why + " at byte " + std::to_string(pos_));
  }

 private:
  void take(char* dst, std::size_t n) {
    if (n > remaining()) fail("truncated");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::string bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const ModelParams& params = checkpoint.params;
  const std::string config = canonical_text(params.config);
  std::string out(kMagic.begin(), kMagic.end());
  put<std::uint64_t>(out, config.size());
  out += config;
  put<std::uint64_t>(out, fnv1a64(config));
  put<std::int64_t>(out, checkpoint.domain_index);
  put<double>(out, checkpoint.val_accuracy);
  put<std::uint64_t>(out, params.entries.size());
  for (const auto& p : params.entries) {
    put<std::uint64_t>(out, p.name.size());
    out += p.name;
    put<std::uint64_t>(out, p.value.rank());
    for (std::size_t d : p.value.shape()) put<std::uint64_t>(out, d);
    for (double v : p.value.data()) put<double>(out, v);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw CheckpointError("cannot open checkpoint for writing: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw CheckpointError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw CheckpointMissingError("checkpoint not found: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  Reader in(std::move(bytes), path.string());

  std::array<char, 4> magic{};
  for (char& c : magic) c = in.get<char>();
  if (magic != kMagic) in.fail("bad magic");

  const std::string config_text = in.text(in.get<std::uint64_t>());
  const auto stored_hash = in.get<std::uint64_t>();
  if (stored_hash != fnv1a64(config_text)) in.fail("config hash does not match embedded config");

  Checkpoint cp;
  try {
    cp.params.config = model_config_from_text(config_text);
  } catch (const std::exception& e) {
    in.fail(std::string("unreadable config: ") + e.what());
  }
  cp.params.hash = stored_hash;
  cp.domain_index = in.get<std::int64_t>();
  cp.val_accuracy = in.get<double>();

  const auto layout = parameter_layout(cp.params.config);
  const auto count = in.get<std::uint64_t>();
  if (count != layout.size()) in.fail("tensor count does not match config");
  for (std::uint64_t t = 0; t < count; ++t) {
    std::string name = in.text(in.get<std::uint64_t>());
    const auto rank = in.get<std::uint64_t>();
    if (rank > kMaxRank) in.fail("implausible tensor rank");
    Shape shape(rank);
    for (auto& d : shape) d = in.get<std::uint64_t>();
    if (name != layout[t].first || shape != layout[t].second) {
      in.fail("tensor '" + name + "' does not match config layout");
    }
    if (shape_size(shape) > in.remaining() / sizeof(double)) in.fail("truncated tensor payload");
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = in.get<double>();
    cp.params.entries.push_back({std::move(name), Tensor(std::move(shape), std::move(values))});
  }
  if (in.remaining() != 0) in.fail("trailing bytes");
  return cp;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected) {
  Checkpoint cp = load_checkpoint(path);
  if (cp.params.hash != config_hash(expected)) {
    throw ConfigHashMismatchError("checkpoint " + path.string() + " was saved for config " +
                                  canonical_text(cp.params.config) + ", expected " + canonical_text(expected));
  }
  return cp;
}

}  // namespace dicausal
