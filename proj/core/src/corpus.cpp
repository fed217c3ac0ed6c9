#include "clickbait/corpus.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "clickbait/util.hpp"
#include "json.hpp"

namespace clickbait {

using nlohmann::json;

namespace {

std::string join_string_array(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (const auto& item : value) {
      if (!out.empty()) out += ' ';
      if (item.is_string()) out += item.get<std::string>();
      else out += item.dump();
    }
    return out;
  }
  if (value.is_null()) return "";
  return value.dump();
}

std::string field_or_empty(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return "";
  return join_string_array(*it);
}

json parse_line(const std::string& line, std::size_t line_no,
                const std::filesystem::path& path) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw DataError("malformed JSON at " + path.string() + ":" +
                    std::to_string(line_no));
  }
  return obj;
}

std::string id_of(const json& obj, std::size_t line_no,
                  const std::filesystem::path& path) {
  auto it = obj.find("id");
  if (it == obj.end()) {
    throw DataError("missing id at " + path.string() + ":" +
                    std::to_string(line_no));
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw DataError("unusable id at " + path.string() + ":" +
                  std::to_string(line_no));
}

}  // namespace

std::vector<PostInstance> load_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open instances file: " + path.string());

  std::vector<PostInstance> instances;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json obj = parse_line(line, line_no, path);

    PostInstance inst;
    inst.id = id_of(obj, line_no, path);
    if (!seen.insert(inst.id).second) {
      throw DataError("duplicate id '" + inst.id + "' at " + path.string() +
                      ":" + std::to_string(line_no));
    }
    if (!obj.contains("postText")) {
      throw DataError("missing postText at " + path.string() + ":" +
                      std::to_string(line_no));
    }
    inst.post_text = join_string_array(obj["postText"]);
    inst.target_title = field_or_empty(obj, "targetTitle");
    inst.target_description = field_or_empty(obj, "targetDescription");
    inst.timestamp = field_or_empty(obj, "postTimestamp");
    inst.target_keywords = field_or_empty(obj, "targetKeywords");
    inst.target_paragraphs = field_or_empty(obj, "targetParagraphs");
    inst.target_captions = field_or_empty(obj, "targetCaptions");

    auto media = obj.find("postMedia");
    inst.has_media = media != obj.end() && media->is_array() && !media->empty();

    instances.push_back(std::move(inst));
  }
  return instances;
}

std::vector<TruthRecord> load_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open truth file: " + path.string());

  std::vector<TruthRecord> truths;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json obj = parse_line(line, line_no, path);

    TruthRecord rec;
    rec.id = id_of(obj, line_no, path);
    if (!seen.insert(rec.id).second) {
      throw DataError("duplicate id '" + rec.id + "' at " + path.string() +
                      ":" + std::to_string(line_no));
    }
    auto judgments = obj.find("truthJudgments");
    if (judgments == obj.end() || !judgments->is_array() ||
        judgments->size() != 5) {
      throw DataError("expected 5 truthJudgments at " + path.string() + ":" +
                      std::to_string(line_no));
    }
    double sum = 0.0;
    for (const auto& j : *judgments) {
      double v = j.get<double>();
      if (v < 0.0 || v > 1.0) {
        throw DataError("judgment out of [0,1] at " + path.string() + ":" +
                        std::to_string(line_no));
      }
      rec.judgments.push_back(v);
      sum += v;
    }
    rec.mean = obj.contains("truthMean") ? obj["truthMean"].get<double>()
                                         : sum / 5.0;
    if (std::abs(rec.mean - sum / 5.0) > 1e-9) {
      throw DataError("truthMean inconsistent with judgments at " +
                      path.string() + ":" + std::to_string(line_no));
    }
    if (obj.contains("truthClass") && obj["truthClass"].is_string()) {
      std::string cls = obj["truthClass"].get<std::string>();
      if (cls == "clickbait") rec.truth_class = TruthClass::Clickbait;
      else if (cls == "no-clickbait") rec.truth_class = TruthClass::NoClickbait;
      else {
        throw DataError("unknown truthClass '" + cls + "' at " + path.string() +
                        ":" + std::to_string(line_no));
      }
    }
    truths.push_back(std::move(rec));
  }
  return truths;
}

void write_instances(const std::filesystem::path& path,
                     const std::vector<PostInstance>& instances) {
  std::ostringstream out;
  for (const auto& inst : instances) {
    json obj;
    obj["id"] = inst.id;
    obj["postText"] = json::array({inst.post_text});
    obj["targetTitle"] = inst.target_title;
    obj["targetDescription"] = inst.target_description;
    obj["postTimestamp"] = inst.timestamp;
    obj["targetKeywords"] = inst.target_keywords;
    obj["targetParagraphs"] = inst.target_paragraphs;
    obj["targetCaptions"] = inst.target_captions;
    obj["postMedia"] =
        inst.has_media ? json::array({"media"}) : json::array();
    out << obj.dump() << '\n';
  }
  write_file(path, out.str());
}

void write_truth(const std::filesystem::path& path,
                 const std::vector<TruthRecord>& truths) {
  std::ostringstream out;
  for (const auto& rec : truths) {
    json obj;
    obj["id"] = rec.id;
    obj["truthJudgments"] = rec.judgments;
    obj["truthMean"] = rec.mean;
    if (rec.truth_class) {
      obj["truthClass"] = *rec.truth_class == TruthClass::Clickbait
                              ? "clickbait"
                              : "no-clickbait";
    }
    out << obj.dump() << '\n';
  }
  write_file(path, out.str());
}

int binarize(const TruthRecord& truth, BinarizationPolicy policy) {
  if (policy == BinarizationPolicy::TruthClassOrMean && truth.truth_class) {
    return *truth.truth_class == TruthClass::Clickbait ? 1 : 0;
  }
  return truth.mean >= 0.5 ? 1 : 0;
}

std::vector<LabeledInstance> join_truth(
    const std::vector<PostInstance>& instances,
    const std::vector<TruthRecord>& truths, BinarizationPolicy policy,
    std::vector<std::string>* orphan_ids) {
  std::unordered_map<std::string, const TruthRecord*> by_id;
  by_id.reserve(truths.size());
  for (const auto& t : truths) by_id[t.id] = &t;

  std::vector<LabeledInstance> out;
  out.reserve(instances.size());
  std::unordered_set<std::string> used;
  for (const auto& inst : instances) {
    auto it = by_id.find(inst.id);
    if (it == by_id.end()) {
      throw DataError("no truth record for id '" + inst.id + "'");
    }
    used.insert(inst.id);
    LabeledInstance li;
    li.instance = inst;
    li.truth = *it->second;
    li.label = binarize(li.truth, policy);
    out.push_back(std::move(li));
  }
  if (orphan_ids) {
    orphan_ids->clear();
    for (const auto& t : truths) {
      if (!used.count(t.id)) orphan_ids->push_back(t.id);
    }
  }
  return out;
}

DatasetSplit split(const std::vector<LabeledInstance>& data, std::size_t na,
                   std::size_t nb, std::size_t nc, std::uint64_t seed) {
  if (na + nb + nc != data.size()) {
    throw UsageError("split sizes " + std::to_string(na) + "+" +
                     std::to_string(nb) + "+" + std::to_string(nc) +
                     " do not sum to " + std::to_string(data.size()));
  }
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // Explicit Fisher-Yates so the permutation does not depend on the standard
  // library's std::shuffle implementation.
  std::mt19937_64 gen(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(order[i - 1], order[j]);
  }

  DatasetSplit out;
  out.seed = seed;
  out.set_a.reserve(na);
  out.set_b.reserve(nb);
  out.set_c.reserve(nc);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& item = data[order[i]];
    if (i < na) out.set_a.push_back(item);
    else if (i < na + nb) out.set_b.push_back(item);
    else out.set_c.push_back(item);
  }
  return out;
}

std::uint64_t corpus_hash(const std::vector<PostInstance>& instances) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& inst : instances) {
    h = fnv1a64(inst.id, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(inst.post_text, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(inst.target_title, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(inst.target_description, h);
    h = fnv1a64(inst.has_media ? "\x1e" "1" : "\x1e" "0", h);
  }
  return h;
}

}  // namespace clickbait
