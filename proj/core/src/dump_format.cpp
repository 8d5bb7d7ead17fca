#include "repsim/dump_format.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <string_view>

#include "repsim/error.hpp"

namespace repsim {

std::string_view toString(IoErrorKind kind) noexcept {
  switch (kind) {
    case IoErrorKind::kOpenFailed: return "open failed";
    case IoErrorKind::kWriteFailed: return "write failed";
    case IoErrorKind::kBadMagic: return "bad magic";
    case IoErrorKind::kUnsupportedVersion: return "unsupported version";
    case IoErrorKind::kTruncated: return "truncated";
    case IoErrorKind::kTrailingBytes: return "trailing bytes";
    case IoErrorKind::kDuplicateName: return "duplicate name";
    case IoErrorKind::kInvalidTag: return "invalid tag";
    case IoErrorKind::kInvalidName: return "invalid name";
    case IoErrorKind::kInvalidShape: return "invalid shape";
    case IoErrorKind::kNonFiniteValue: return "non-finite value";
    case IoErrorKind::kLabelOutOfRange: return "label out of range";
    case IoErrorKind::kMalformedText: return "malformed text";
  }
  return "unknown";
}

namespace {

constexpr std::string_view kActivationMagic = "NAF1";
constexpr std::string_view kPredictionMagic = "NPF1";

// Bounds-checked little-endian reader over an immutable buffer.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw IoError(IoErrorKind::kTruncated,
                    std::string(what) + " needs " + std::to_string(n) + " bytes at offset " +
                        std::to_string(pos_) + ", " + std::to_string(remaining()) + " left");
    }
  }

  template <typename T>
  T uint(const char* what) {
    require(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    require(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void expectMagic(std::string_view magic) {
    const std::size_t n = std::min(remaining(), magic.size());
    const auto head = bytes_.subspan(pos_, n);
    if (!std::equal(head.begin(), head.end(), magic.begin(),
                    [](std::uint8_t b, char c) { return b == static_cast<std::uint8_t>(c); })) {
      throw IoError(IoErrorKind::kBadMagic, "expected \"" + std::string(magic) + "\"");
    }
    require(magic.size(), "magic");
    pos_ += magic.size();
  }

  void expectEnd() const {
    if (remaining() != 0) {
      throw IoError(IoErrorKind::kTrailingBytes,
                    std::to_string(remaining()) + " bytes after the declared payload");
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class Writer {
 public:
  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> release() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

bool validUtf8(std::span<const std::uint8_t> s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const std::uint8_t c = s[i];
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) { ++i; continue; }
    if ((c & 0xE0) == 0xC0) { len = 2; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { len = 3; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { len = 4; cp = c & 0x07; }
    else return false;
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += len;
  }
  return true;
}

std::string readName(Reader& r, const char* what) {
  const auto len = r.uint<std::uint16_t>(what);
  const auto raw = r.take(len, what);
  if (len == 0) throw IoError(IoErrorKind::kInvalidName, std::string(what) + " is empty");
  if (!validUtf8(raw)) throw IoError(IoErrorKind::kInvalidName, std::string(what) + " is not valid UTF-8");
  return std::string(raw.begin(), raw.end());
}

void writeName(Writer& w, const std::string& name) {
  if (name.empty() || name.size() > 0xFFFF) {
    throw IoError(IoErrorKind::kInvalidName, "name length must be in [1, 65535]: '" + name + "'");
  }
  w.uint(static_cast<std::uint16_t>(name.size()));
  w.bytes(name);
}

std::uint64_t checkedProduct(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw IoError(IoErrorKind::kInvalidShape, std::string(what) + " size overflows");
  }
  return out;
}

}  // namespace

LayerSet parseActivationDump(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expectMagic(kActivationMagic);
  const auto version = r.uint<std::uint16_t>("format version");
  if (version != kActivationFormatVersion) {
    throw IoError(IoErrorKind::kUnsupportedVersion, "format version " + std::to_string(version));
  }
  const auto m = r.uint<std::uint32_t>("example count");
  const auto layerCount = r.uint<std::uint32_t>("layer count");
  if (m == 0) throw IoError(IoErrorKind::kInvalidShape, "example count is zero");

  std::vector<Layer> layers;
  std::set<std::string> names;
  for (std::uint32_t li = 0; li < layerCount; ++li) {
    Layer layer{readName(r, "layer name"), 0, LayerPosition::kOther, StorageType::kFloat64,
                Matrix(1, 1)};
    if (!names.insert(layer.name).second) {
      throw IoError(IoErrorKind::kDuplicateName, "layer '" + layer.name + "' appears twice");
    }
    layer.stage = r.uint<std::uint8_t>("stage tag");
    const auto position = r.uint<std::uint8_t>("position tag");
    if (position > 2) {
      throw IoError(IoErrorKind::kInvalidTag, "position tag " + std::to_string(position));
    }
    layer.position = static_cast<LayerPosition>(position);
    const auto dtype = r.uint<std::uint8_t>("dtype");
    if (dtype > 1) throw IoError(IoErrorKind::kInvalidTag, "dtype " + std::to_string(dtype));
    layer.storage = static_cast<StorageType>(dtype);
    const auto p = r.uint<std::uint32_t>("feature count");
    if (p == 0) throw IoError(IoErrorKind::kInvalidShape, "layer '" + layer.name + "' has no features");

    const std::uint64_t count = checkedProduct(m, p, "layer");
    const std::uint64_t width = dtype == 0 ? 4 : 8;
    const std::uint64_t payload = checkedProduct(count, width, "layer");
    if (payload > r.remaining()) {
      throw IoError(IoErrorKind::kTruncated, "layer '" + layer.name + "' declares " +
                                                 std::to_string(payload) + " value bytes, " +
                                                 std::to_string(r.remaining()) + " left");
    }
    const auto raw = r.take(static_cast<std::size_t>(payload), "layer values");
    std::vector<double> values(static_cast<std::size_t>(count));
    for (std::size_t k = 0; k < values.size(); ++k) {
      const std::uint8_t* src = raw.data() + k * width;
      if (width == 4) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(src[b]) << (8 * b);
        values[k] = static_cast<double>(std::bit_cast<float>(bits));
      } else {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(src[b]) << (8 * b);
        values[k] = std::bit_cast<double>(bits);
      }
      if (!std::isfinite(values[k])) {
        throw IoError(IoErrorKind::kNonFiniteValue,
                      "layer '" + layer.name + "' value " + std::to_string(k));
      }
    }
    layer.activations = Matrix(m, p, std::move(values));
    layers.push_back(std::move(layer));
  }
  r.expectEnd();
  return LayerSet(std::move(layers));
}

std::vector<std::uint8_t> encodeActivationDump(const LayerSet& layers) {
  if (layers.empty()) throw IoError(IoErrorKind::kInvalidShape, "no layers to write");
  if (layers.exampleCount() > 0xFFFFFFFFu || layers.size() > 0xFFFFFFFFu) {
    throw IoError(IoErrorKind::kInvalidShape, "dump exceeds 32-bit counts");
  }
  Writer w;
  w.bytes(kActivationMagic);
  w.uint(kActivationFormatVersion);
  w.uint(static_cast<std::uint32_t>(layers.exampleCount()));
  w.uint(static_cast<std::uint32_t>(layers.size()));
  for (const auto& l : layers) {
    writeName(w, l.name);
    w.uint(l.stage);
    w.uint(static_cast<std::uint8_t>(l.position));
    w.uint(static_cast<std::uint8_t>(l.storage));
    w.uint(static_cast<std::uint32_t>(l.activations.cols()));
    for (double v : l.activations.values()) {
      if (l.storage == StorageType::kFloat32) {
        const auto f = static_cast<float>(v);
        if (!std::isfinite(f)) {
          throw IoError(IoErrorKind::kNonFiniteValue,
                        "layer '" + l.name + "' has a value outside the f32 range");
        }
        w.uint(std::bit_cast<std::uint32_t>(f));
      } else {
        w.uint(std::bit_cast<std::uint64_t>(v));
      }
    }
  }
  return w.release();
}

PredictionDump parsePredictionDump(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expectMagic(kPredictionMagic);
  PredictionDump d;
  const auto modelCount = r.uint<std::uint32_t>("model count");
  const auto exampleCount = r.uint<std::uint32_t>("example count");
  d.classCount = r.uint<std::uint32_t>("class count");
  if (exampleCount == 0 || d.classCount == 0) {
    throw IoError(IoErrorKind::kInvalidShape, "example and class counts must be positive");
  }
  const auto labelBytes = checkedProduct(exampleCount, 2, "label block");
  // Each model needs at least a name length, one name byte and its labels.
  const auto perModel = labelBytes + 3;
  if (labelBytes > r.remaining() ||
      checkedProduct(modelCount, perModel, "model block") > r.remaining() - labelBytes) {
    throw IoError(IoErrorKind::kTruncated, "declared counts exceed the payload");
  }
  auto readLabels = [&](std::vector<std::uint16_t>& out, const char* what) {
    out.resize(exampleCount);
    for (auto& l : out) {
      l = r.uint<std::uint16_t>(what);
      if (l >= d.classCount) {
        throw IoError(IoErrorKind::kLabelOutOfRange,
                      std::string(what) + " " + std::to_string(l) + " >= class count " +
                          std::to_string(d.classCount));
      }
    }
  };
  readLabels(d.trueLabels, "true label");
  std::set<std::string> names;
  for (std::uint32_t k = 0; k < modelCount; ++k) {
    ModelPredictions mp;
    mp.name = readName(r, "model name");
    if (!names.insert(mp.name).second) {
      throw IoError(IoErrorKind::kDuplicateName, "model '" + mp.name + "' appears twice");
    }
    readLabels(mp.labels, "predicted label");
    d.models.push_back(std::move(mp));
  }
  r.expectEnd();
  return d;
}

std::vector<std::uint8_t> encodePredictionDump(const PredictionDump& dump) {
  if (dump.trueLabels.empty() || dump.classCount == 0) {
    throw IoError(IoErrorKind::kInvalidShape, "example and class counts must be positive");
  }
  if (dump.trueLabels.size() > 0xFFFFFFFFu || dump.models.size() > 0xFFFFFFFFu) {
    throw IoError(IoErrorKind::kInvalidShape, "dump exceeds 32-bit counts");
  }
  std::set<std::string> names;
  for (const auto& m : dump.models) {
    if (!names.insert(m.name).second) {
      throw IoError(IoErrorKind::kDuplicateName, "model '" + m.name + "' appears twice");
    }
  }
  auto checkLabels = [&](const std::vector<std::uint16_t>& labels) {
    for (auto l : labels) {
      if (l >= dump.classCount) {
        throw IoError(IoErrorKind::kLabelOutOfRange,
                      "label " + std::to_string(l) + " >= class count " +
                          std::to_string(dump.classCount));
      }
    }
  };
  checkLabels(dump.trueLabels);
  for (const auto& m : dump.models) checkLabels(m.labels);

  Writer w;
  w.bytes(kPredictionMagic);
  w.uint(static_cast<std::uint32_t>(dump.models.size()));
  w.uint(static_cast<std::uint32_t>(dump.trueLabels.size()));
  w.uint(dump.classCount);
  for (auto l : dump.trueLabels) w.uint(l);
  for (const auto& m : dump.models) {
    if (m.labels.size() != dump.trueLabels.size()) {
      throw IoError(IoErrorKind::kInvalidShape, "model '" + m.name + "' has the wrong label count");
    }
    writeName(w, m.name);
    for (auto l : m.labels) w.uint(l);
  }
  return w.release();
}

std::vector<std::uint8_t> readFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::kOpenFailed, path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void writeFileBytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::kOpenFailed, path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoErrorKind::kWriteFailed, path.string());
}

LayerSet readActivationDump(const std::filesystem::path& path) {
  return parseActivationDump(readFileBytes(path));
}

void writeActivationDump(const LayerSet& layers, const std::filesystem::path& path) {
  writeFileBytes(path, encodeActivationDump(layers));
}

PredictionDump readPredictionDump(const std::filesystem::path& path) {
  return parsePredictionDump(readFileBytes(path));
}

void writePredictionDump(const PredictionDump& dump, const std::filesystem::path& path) {
  writeFileBytes(path, encodePredictionDump(dump));
}

PredictionEnsemble toEnsemble(const PredictionDump& dump, std::string groupName) {
  std::vector<std::vector<Label>> rows;
  std::vector<std::string> names;
  for (const auto& m : dump.models) {
    rows.emplace_back(m.labels.begin(), m.labels.end());
    names.push_back(m.name);
  }
  return PredictionEnsemble(std::move(groupName),
                            std::vector<Label>(dump.trueLabels.begin(), dump.trueLabels.end()),
                            dump.classCount, std::move(rows), std::move(names));
}

}  // namespace repsim
