#include <array>
#include <cstring>
#include <fstream>

#include "rudu/error.hpp"
#include "rudu/nn/net.hpp"

namespace rudu::nn {

namespace {

constexpr std::array<char, 8> kMagic{'R', 'U', 'D', 'U', 'N', 'E', 'T', '\0'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) fail(ErrorKind::incompatible_checkpoint, "truncated checkpoint");
  return value;
}

}  // namespace

// Layout (native little-endian): magic, schema, six config ints, version,
// tensor count, then per tensor: name, rank, dims, float64 values.
void save_params(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write checkpoint: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointSchema);
  const auto& c = params.config();
  for (int v : {c.input_planes, c.height, c.width, c.conv_layers, c.channels, c.action_space}) {
    put<std::int32_t>(out, v);
  }
  put<std::uint64_t>(out, params.version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.tensors().size()));
  for (const auto& t : params.tensors()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) put<std::int32_t>(out, d);
    const auto values = params.tensor(t.name);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  if (!out) fail(ErrorKind::io, "failed writing checkpoint: " + path.string());
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::missing_file, "cannot open checkpoint: " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) fail(ErrorKind::incompatible_checkpoint, "not a checkpoint file");
  const auto schema = get<std::uint32_t>(in);
  if (schema != kCheckpointSchema) {
    fail(ErrorKind::incompatible_checkpoint,
         "checkpoint schema " + std::to_string(schema) + " is not supported");
  }
  NetConfig c;
  c.input_planes = get<std::int32_t>(in);
  c.height = get<std::int32_t>(in);
  c.width = get<std::int32_t>(in);
  c.conv_layers = get<std::int32_t>(in);
  c.channels = get<std::int32_t>(in);
  c.action_space = get<std::int32_t>(in);
  ModelParams params(c);
  params.version = get<std::uint64_t>(in);
  const auto count = get<std::uint32_t>(in);
  if (count != params.tensors().size()) {
    fail(ErrorKind::incompatible_checkpoint, "tensor count does not match the config");
  }
  for (const auto& t : params.tensors()) {
    const auto len = get<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    if (name != t.name) fail(ErrorKind::incompatible_checkpoint, "unexpected tensor " + name);
    const auto rank = get<std::uint32_t>(in);
    if (rank != t.shape.size()) fail(ErrorKind::incompatible_checkpoint, "rank mismatch in " + name);
    for (int d : t.shape) {
      if (get<std::int32_t>(in) != d) fail(ErrorKind::incompatible_checkpoint, "shape mismatch in " + name);
    }
    auto values = params.tensor(t.name);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) fail(ErrorKind::incompatible_checkpoint, "truncated tensor " + name);
  }
  return params;
}

}  // namespace rudu::nn
