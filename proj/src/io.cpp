// src/io.cpp

// Copyright 2026  osid authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "osid/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace osid::io {

using nlohmann::json;

namespace {

constexpr char kCorpusMagic[] = "SPKEMB1";  // 7 bytes, no terminator on disk
constexpr std::size_t kMagicLen = 7;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

// Cursor with offset-aware error reporting.
struct Reader {
  const std::string& bytes;
  std::size_t at = 0;
  std::string name;

  void need(std::size_t n, const char* field) {
    if (at + n > bytes.size())
      throw Error(ErrorCode::FormatError,
                  name + ": truncated while reading " + field + " at offset " +
                      std::to_string(at));
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i]))
           << (8 * i);
    at += 4;
    return v;
  }
  std::uint64_t u64(const char* field) {
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i]))
           << (8 * i);
    at += 8;
    return v;
  }
  float f32(const char* field) {
    return std::bit_cast<float>(u32(field));
  }
  std::string str(const char* field) {
    const std::uint32_t len = u32(field);
    need(len, field);
    std::string s = bytes.substr(at, len);
    at += len;
    return s;
  }
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* activation_name(nnet::Activation a) {
  switch (a) {
    case nnet::Activation::ReLU: return "relu";
    case nnet::Activation::Identity: return "identity";
    case nnet::Activation::Sigmoid: return "sigmoid";
  }
  return "relu";
}

nnet::Activation parse_activation(const std::string& name) {
  if (name == "relu") return nnet::Activation::ReLU;
  if (name == "identity") return nnet::Activation::Identity;
  if (name == "sigmoid") return nnet::Activation::Sigmoid;
  throw Error(ErrorCode::FormatError, "unknown activation '" + name + "'");
}

json network_header(const nnet::MlpModel& model) {
  json layers = json::array();
  for (const nnet::Layer& l : model.layers)
    layers.push_back({{"in", l.weight.cols()},
                      {"out", l.weight.rows()},
                      {"activation", activation_name(l.activation)}});
  return {{"dropout", model.dropout_rate}, {"layers", layers}};
}

nnet::MlpModel network_from_header(const json& j) {
  nnet::MlpModel model;
  model.dropout_rate = j.at("dropout").get<double>();
  for (const json& lj : j.at("layers")) {
    nnet::Layer layer;
    layer.weight.resize(lj.at("out").get<Index>(), lj.at("in").get<Index>());
    layer.bias.resize(lj.at("out").get<Index>());
    layer.activation = parse_activation(lj.at("activation").get<std::string>());
    model.layers.push_back(std::move(layer));
  }
  if (model.layers.empty())
    throw Error(ErrorCode::FormatError, "checkpoint network has no layers");
  return model;
}

void append_parameters_f32(std::string& out, const nnet::MlpModel& model) {
  for (const nnet::Layer& l : model.layers) {
    for (Index i = 0; i < l.weight.size(); ++i)
      put_f32(out, static_cast<float>(l.weight.data()[i]));
    for (Index i = 0; i < l.bias.size(); ++i)
      put_f32(out, static_cast<float>(l.bias[i]));
  }
}

void read_parameters_f32(Reader& r, nnet::MlpModel& model) {
  for (nnet::Layer& l : model.layers) {
    for (Index i = 0; i < l.weight.size(); ++i)
      l.weight.data()[i] = static_cast<double>(r.f32("weight"));
    for (Index i = 0; i < l.bias.size(); ++i)
      l.bias[i] = static_cast<double>(r.f32("bias"));
  }
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorCode::IoError, "cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
      throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error(ErrorCode::IoError,
                "cannot move '" + tmp.string() + "' to '" + path.string() +
                    "': " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus,
                  Partition which) {
  std::string out;
  out.append(kCorpusMagic, kMagicLen);
  put_u32(out, static_cast<std::uint32_t>(corpus.dim()));

  std::uint64_t count = 0;
  for (Index s = 0; s < corpus.speaker_count(); ++s)
    if (corpus.speaker(s).partition == which)
      count += corpus.speaker(s).utterances.size();
  put_u64(out, count);
  out.push_back(static_cast<char>(which));

  for (Index s = 0; s < corpus.speaker_count(); ++s) {
    const SpeakerRecord& spk = corpus.speaker(s);
    if (spk.partition != which) continue;
    for (std::size_t u = 0; u < spk.utterances.size(); ++u) {
      put_u32(out, static_cast<std::uint32_t>(spk.id.size()));
      out += spk.id;
      put_u32(out, static_cast<std::uint32_t>(spk.utterance_ids[u].size()));
      out += spk.utterance_ids[u];
      for (Index i = 0; i < corpus.dim(); ++i)
        put_f32(out, static_cast<float>(spk.utterances[u][i]));
    }
  }
  write_file_atomic(path, out);
}

namespace {

Corpus read_corpus_jsonl(const std::string& bytes, const std::string& name,
                         Partition assigned) {
  std::istringstream in(bytes);
  std::string line;
  long line_no = 0;
  Index dim = -1;
  std::vector<std::string> order;  // speaker ids in first-seen order
  std::vector<SpeakerRecord> records;
  auto find_record = [&](const std::string& id) -> SpeakerRecord& {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == id) return records[i];
    order.push_back(id);
    SpeakerRecord r;
    r.id = id;
    r.partition = assigned;
    records.push_back(std::move(r));
    return records.back();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError,
                  name + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("speaker") || !j.contains("utt") || !j.contains("vec"))
      throw Error(ErrorCode::FormatError,
                  name + ":" + std::to_string(line_no) +
                      ": record needs fields speaker, utt, vec");
    const auto& vec = j.at("vec");
    if (dim < 0) dim = static_cast<Index>(vec.size());
    if (static_cast<Index>(vec.size()) != dim)
      throw Error(ErrorCode::FormatError,
                  name + ":" + std::to_string(line_no) + ": field vec has " +
                      std::to_string(vec.size()) + " components, expected " +
                      std::to_string(dim));
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = vec.at(static_cast<std::size_t>(i)).get<double>();
    SpeakerRecord& rec = find_record(j.at("speaker").get<std::string>());
    rec.utterance_ids.push_back(j.at("utt").get<std::string>());
    rec.utterances.push_back(std::move(v));
  }
  if (dim < 0)
    throw Error(ErrorCode::FormatError, name + ": no records");
  Corpus corpus(dim);
  for (SpeakerRecord& r : records) corpus.add_speaker(std::move(r));
  corpus.validate();
  return corpus;
}

}  // namespace

Corpus read_corpus(const std::filesystem::path& path, Partition expected) {
  const std::string bytes = read_file(path);
  if (bytes.size() < kMagicLen ||
      std::memcmp(bytes.data(), kCorpusMagic, kMagicLen) != 0)
    return read_corpus_jsonl(bytes, path.string(), expected);

  Reader r{bytes, kMagicLen, path.string()};
  const Index dim = static_cast<Index>(r.u32("dim"));
  const std::uint64_t count = r.u64("record count");
  r.need(1, "partition tag");
  const auto tag = static_cast<unsigned char>(bytes[r.at++]);
  if (tag > 1)
    throw Error(ErrorCode::FormatError,
                path.string() + ": partition tag " + std::to_string(tag) +
                    " at offset " + std::to_string(r.at - 1));
  const Partition partition = static_cast<Partition>(tag);
  if (partition != expected)
    throw Error(ErrorCode::FormatError,
                path.string() + ": file holds the " + partition_name(partition) +
                    " partition, expected " + partition_name(expected));

  std::vector<std::string> order;
  std::vector<SpeakerRecord> records;
  for (std::uint64_t n = 0; n < count; ++n) {
    const std::string speaker = r.str("speaker id");
    const std::string utt = r.str("utterance id");
    Vector v(dim);
    for (Index i = 0; i < dim; ++i)
      v[i] = static_cast<double>(r.f32("embedding"));
    std::size_t slot = order.size();
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == speaker) {
        slot = i;
        break;
      }
    if (slot == order.size()) {
      order.push_back(speaker);
      SpeakerRecord rec;
      rec.id = speaker;
      rec.partition = partition;
      records.push_back(std::move(rec));
    }
    records[slot].utterance_ids.push_back(utt);
    records[slot].utterances.push_back(std::move(v));
  }
  if (r.at != bytes.size())
    throw Error(ErrorCode::FormatError,
                path.string() + ": " + std::to_string(bytes.size() - r.at) +
                    " trailing bytes after the declared " +
                    std::to_string(count) + " records");

  Corpus corpus(dim);
  for (SpeakerRecord& rec : records) corpus.add_speaker(std::move(rec));
  corpus.validate();
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& train_path,
                   const std::filesystem::path& test_path) {
  Corpus train = read_corpus(train_path, Partition::Train);
  Corpus test = read_corpus(test_path, Partition::Test);
  if (train.dim() != test.dim())
    throw Error(ErrorCode::FormatError,
                "train corpus dimension " + std::to_string(train.dim()) +
                    " does not match test corpus dimension " +
                    std::to_string(test.dim()));
  Corpus merged(train.dim());
  for (Index i = 0; i < train.speaker_count(); ++i)
    merged.add_speaker(train.speaker(i));
  for (Index i = 0; i < test.speaker_count(); ++i)
    merged.add_speaker(test.speaker(i));
  merged.validate();
  return merged;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  json header;
  header["format"] = "osid-checkpoint-v1";
  header["stage"] = ckpt.stage;
  header["seed"] = ckpt.seed;
  header["dim"] = ckpt.stack.dim;
  header["m_train"] = ckpt.stack.m_train;
  header["networks"] = {{"adapter", network_header(ckpt.stack.adapter)},
                        {"relnet", network_header(ckpt.stack.relnet)},
                        {"idn", network_header(ckpt.stack.idn)}};
  const std::string header_bytes = header.dump();

  std::string out;
  put_u64(out, header_bytes.size());
  out += header_bytes;
  append_parameters_f32(out, ckpt.stack.adapter);
  append_parameters_f32(out, ckpt.stack.relnet);
  append_parameters_f32(out, ckpt.stack.idn);
  write_file_atomic(path, out);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  Reader r{bytes, 0, path.string()};
  const std::uint64_t header_len = r.u64("header length");
  r.need(header_len, "header");
  json header;
  try {
    header = json::parse(bytes.substr(r.at, header_len));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError,
                path.string() + ": header: " + e.what());
  }
  r.at += header_len;
  if (header.value("format", "") != "osid-checkpoint-v1")
    throw Error(ErrorCode::FormatError,
                path.string() + ": field format is not osid-checkpoint-v1");

  Checkpoint ckpt;
  ckpt.stage = header.at("stage").get<std::string>();
  ckpt.seed = header.at("seed").get<std::uint64_t>();
  ckpt.stack.dim = header.at("dim").get<Index>();
  ckpt.stack.m_train = header.at("m_train").get<Index>();
  const json& nets = header.at("networks");
  ckpt.stack.adapter = network_from_header(nets.at("adapter"));
  ckpt.stack.relnet = network_from_header(nets.at("relnet"));
  ckpt.stack.idn = network_from_header(nets.at("idn"));
  read_parameters_f32(r, ckpt.stack.adapter);
  read_parameters_f32(r, ckpt.stack.relnet);
  read_parameters_f32(r, ckpt.stack.idn);
  if (r.at != bytes.size())
    throw Error(ErrorCode::FormatError,
                path.string() + ": " + std::to_string(bytes.size() - r.at) +
                    " trailing bytes after parameter blob");
  return ckpt;
}

void write_trial_pairs(const std::filesystem::path& path,
                       const std::vector<TrialPair>& pairs) {
  std::string out;
  for (const TrialPair& p : pairs) {
    out += format_double(p.score);
    out += '\t';
    out += p.is_target ? "target" : "nontarget";
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<TrialPair> read_trial_pairs(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::vector<TrialPair> pairs;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(ErrorCode::FormatError,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected score<TAB>label");
    TrialPair p;
    try {
      std::size_t used = 0;
      p.score = std::stod(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::FormatError,
                  path.string() + ":" + std::to_string(line_no) +
                      ": field score is not a number: '" + line.substr(0, tab) +
                      "'");
    }
    const std::string label = line.substr(tab + 1);
    if (label == "target") {
      p.is_target = true;
    } else if (label == "nontarget") {
      p.is_target = false;
    } else {
      throw Error(ErrorCode::FormatError,
                  path.string() + ":" + std::to_string(line_no) +
                      ": field label must be target or nontarget, got '" +
                      label + "'");
    }
    pairs.push_back(p);
  }
  return pairs;
}

std::string threshold_table_to_json(const ThresholdTable& table) {
  json j;
  if (table.mode == ThresholdTable::Mode::Fixed) {
    j["mode"] = "fixed";
    j["tau"] = table.tau;
  } else {
    j["mode"] = "per_speaker";
    j["tau"] = json::array();
    for (Index i = 0; i < table.per_speaker.size(); ++i)
      j["tau"].push_back(table.per_speaker[i]);
    j["speakers"] = table.speakers;
  }
  return j.dump() + "\n";
}

ThresholdTable threshold_table_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("threshold table: ") + e.what());
  }
  ThresholdTable table;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "fixed") {
    table.mode = ThresholdTable::Mode::Fixed;
    table.tau = j.at("tau").get<double>();
  } else if (mode == "per_speaker") {
    table.mode = ThresholdTable::Mode::PerSpeaker;
    const json& taus = j.at("tau");
    table.per_speaker.resize(static_cast<Index>(taus.size()));
    for (std::size_t i = 0; i < taus.size(); ++i)
      table.per_speaker[static_cast<Index>(i)] = taus[i].get<double>();
    if (j.contains("speakers"))
      table.speakers = j.at("speakers").get<std::vector<std::string>>();
  } else {
    throw Error(ErrorCode::FormatError,
                "threshold table: field mode must be fixed or per_speaker");
  }
  return table;
}

void write_threshold_table(const std::filesystem::path& path,
                           const ThresholdTable& table) {
  write_file_atomic(path, threshold_table_to_json(table));
}

ThresholdTable read_threshold_table(const std::filesystem::path& path) {
  return threshold_table_from_json(read_file(path));
}

void write_train_report(const std::filesystem::path& path,
                        const TrainReport& report) {
  std::string out = "episode\tstage\tl_relation\tl_imposter\tl_total\n";
  char buf[128];
  for (const TrainReportRow& row : report) {
    std::snprintf(buf, sizeof buf, "%ld\t%c\t%.12g\t%.12g\t%.12g\n", row.step,
                  row.stage, row.l_relation, row.l_imposter, row.l_total);
    out += buf;
  }
  write_file_atomic(path, out);
}

std::string eer_to_json(const EerResult& result) {
  json j;
  j["eer"] = result.eer;
  j["threshold"] = result.threshold;
  j["far_curve"] = json::array();
  for (const auto& [t, rate] : result.far_curve)
    j["far_curve"].push_back({t, rate});
  j["frr_curve"] = json::array();
  for (const auto& [t, rate] : result.frr_curve)
    j["frr_curve"].push_back({t, rate});
  return j.dump(2) + "\n";
}

void write_eval_reports(
    const std::filesystem::path& json_path,
    const std::filesystem::path& tsv_path,
    const std::vector<std::pair<std::string, EvalResult>>& method_results,
    Index n_sets) {
  json j;
  j["n_sets"] = n_sets;
  j["methods"] = json::object();
  for (const auto& [name, result] : method_results) {
    j["methods"][name] = {{"overall_mean", result.overall_mean},
                          {"overall_ci95", result.overall_ci95},
                          {"imposter_mean", result.imposter_mean},
                          {"imposter_ci95", result.imposter_ci95}};
  }
  write_file_atomic(json_path, j.dump(2) + "\n");

  std::string tsv =
      "method\toverall_mean\toverall_ci95\timposter_mean\timposter_ci95\n";
  char buf[192];
  for (const auto& [name, result] : method_results) {
    std::snprintf(buf, sizeof buf, "%s\t%.6f\t%.6f\t%.6f\t%.6f\n", name.c_str(),
                  result.overall_mean, result.overall_ci95,
                  result.imposter_mean, result.imposter_ci95);
    tsv += buf;
  }
  write_file_atomic(tsv_path, tsv);
}

}  // namespace osid::io
