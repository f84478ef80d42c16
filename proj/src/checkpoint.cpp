#include "radlabel/checkpoint.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "radlabel/errors.hpp"

namespace radlabel {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kMagic = 0x31544c52;  // "RLT1"
constexpr int kSchemaVersion = 1;

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void save_tensors(const std::vector<const Tensor*>& tensors,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  write_u64(out, kMagic);
  write_u64(out, tensors.size());
  for (const Tensor* t : tensors) {
    write_u64(out, t->name.size());
    out.write(t->name.data(), static_cast<std::streamsize>(t->name.size()));
    write_u64(out, static_cast<std::uint64_t>(t->value.rows()));
    write_u64(out, static_cast<std::uint64_t>(t->value.cols()));
    out.write(reinterpret_cast<const char*>(t->value.data()),
              static_cast<std::streamsize>(sizeof(double) * t->value.size()));
  }
  if (!out) throw IOError("failed writing '" + path + "'");
}

void load_tensors(const std::vector<Tensor*>& tensors,
                  const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open '" + path + "' for reading");
  if (read_u64(in) != kMagic) {
    throw FormatError("'" + path + "' is not a tensor file");
  }
  const auto count = read_u64(in);
  if (count != tensors.size()) {
    throw FormatError("'" + path + "' holds " + std::to_string(count) +
                      " tensors, expected " + std::to_string(tensors.size()));
  }
  for (Tensor* t : tensors) {
    const auto name_len = read_u64(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    if (name != t->name) {
      throw FormatError("tensor order mismatch in '" + path + "': expected " +
                        t->name + ", found " + name);
    }
    const auto rows = read_u64(in);
    const auto cols = read_u64(in);
    if (rows != static_cast<std::uint64_t>(t->value.rows()) ||
        cols != static_cast<std::uint64_t>(t->value.cols())) {
      throw FormatError("tensor " + name + " in '" + path +
                        "' has unexpected shape");
    }
    in.read(reinterpret_cast<char*>(t->value.data()),
            static_cast<std::streamsize>(sizeof(double) * t->value.size()));
    if (!in) throw FormatError("'" + path + "' is truncated");
  }
}

json make_manifest(const MultiHeadClassifier& model) {
  const EncoderConfig& cfg = model.encoder().config();
  json conditions = json::array();
  for (const Condition c : all_conditions()) {
    conditions.push_back(std::string(condition_name(c)));
  }
  return json{
      {"schema_version", kSchemaVersion},
      {"encoder",
       {{"name", cfg.name},
        {"hidden_size", cfg.hidden_size},
        {"num_layers", cfg.num_layers},
        {"num_heads", cfg.num_heads},
        {"ff_size", cfg.ff_size},
        {"max_tokens", cfg.max_tokens},
        {"vocab_size", model.encoder().vocabulary().size()}}},
      {"head_input_mode",
       std::string(head_input_mode_name(model.head_input_mode()))},
      {"hidden_size", cfg.hidden_size},
      {"conditions", conditions},
  };
}

std::vector<const Tensor*> encoder_tensors(const MultiHeadClassifier& model) {
  return model.encoder().parameters();
}

std::vector<const Tensor*> head_tensors(const MultiHeadClassifier& model) {
  auto all = model.parameters();
  const auto n_enc = model.encoder().parameters().size();
  return {all.begin() + static_cast<std::ptrdiff_t>(n_enc), all.end()};
}

}  // namespace

void save_checkpoint(const MultiHeadClassifier& model, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IOError("cannot create checkpoint directory '" + dir + "'");

  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw IOError("cannot write manifest in '" + dir + "'");
  mf << make_manifest(model).dump(2) << '\n';

  model.encoder().vocabulary().save((fs::path(dir) / "vocab.txt").string());
  save_tensors(encoder_tensors(model), (fs::path(dir) / "encoder.bin").string());
  save_tensors(head_tensors(model), (fs::path(dir) / "heads.bin").string());
}

namespace {

struct Manifest {
  EncoderConfig config;
  HeadInputMode head_input_mode;
};

Manifest read_manifest(const std::string& dir) {
  const auto path = fs::path(dir) / "manifest.json";
  std::ifstream in(path);
  if (!in) throw IOError("cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("invalid manifest in '" + dir + "': " + e.what());
  }
  if (j.value("schema_version", -1) != kSchemaVersion) {
    throw FormatError("unsupported checkpoint schema version in '" + dir +
                      "'");
  }
  std::vector<std::string> conditions =
      j.at("conditions").get<std::vector<std::string>>();
  if (conditions.size() != kNumConditions) {
    throw FormatError("manifest condition list has wrong size");
  }
  for (std::size_t i = 0; i < kNumConditions; ++i) {
    if (conditions[i] != condition_name(static_cast<Condition>(i))) {
      throw FormatError("manifest condition order differs from canonical at " +
                        conditions[i]);
    }
  }
  Manifest m;
  const json& e = j.at("encoder");
  m.config.name = e.at("name").get<std::string>();
  m.config.hidden_size = e.at("hidden_size").get<int>();
  m.config.num_layers = e.at("num_layers").get<int>();
  m.config.num_heads = e.at("num_heads").get<int>();
  m.config.ff_size = e.at("ff_size").get<int>();
  m.config.max_tokens = e.at("max_tokens").get<int>();
  const auto mode =
      head_input_mode_from_name(j.at("head_input_mode").get<std::string>());
  if (!mode) throw FormatError("unknown head_input_mode in manifest");
  m.head_input_mode = *mode;
  return m;
}

}  // namespace

MultiHeadClassifier load_checkpoint(const std::string& dir) {
  const Manifest m = read_manifest(dir);
  Vocabulary vocab = Vocabulary::load((fs::path(dir) / "vocab.txt").string());
  MultiHeadClassifier model(m.config, std::move(vocab), /*seed=*/0);
  model.set_head_input_mode(m.head_input_mode);
  load_weights_into(model, dir);
  return model;
}

void load_weights_into(MultiHeadClassifier& model, const std::string& dir) {
  auto all = model.parameters();
  const auto n_enc = model.encoder().parameters().size();
  std::vector<Tensor*> enc(all.begin(),
                           all.begin() + static_cast<std::ptrdiff_t>(n_enc));
  std::vector<Tensor*> heads(all.begin() + static_cast<std::ptrdiff_t>(n_enc),
                             all.end());
  load_tensors(enc, (fs::path(dir) / "encoder.bin").string());
  load_tensors(heads, (fs::path(dir) / "heads.bin").string());
}

MultiHeadClassifier model_with_pretrained_encoder(const std::string& dir) {
  MultiHeadClassifier model = load_checkpoint(dir);
  for (Tensor* t : model.head_parameters()) t->value.setZero();
  return model;
}

}  // namespace radlabel
