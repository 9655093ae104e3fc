#include "diagline/instance.hpp"

#include <fstream>

#include "diagline/errors.hpp"
#include "diagline/util.hpp"

namespace diagline {

namespace {

BigInt parse_integer(const nlohmann::json& v, const char* field) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned()) return BigInt(v.get<std::uint64_t>());
    return BigInt(v.get<std::int64_t>());
  }
  if (v.is_string()) {
    const auto& str = v.get_ref<const std::string&>();
    std::size_t start = (!str.empty() && (str[0] == '-' || str[0] == '+')) ? 1 : 0;
    if (str.size() == start) throw InvalidInput(std::string("empty integer in field ") + field);
    for (std::size_t i = start; i < str.size(); ++i)
      if (str[i] < '0' || str[i] > '9')
        throw InvalidInput(std::string("non-decimal integer in field ") + field);
    return BigInt(str[0] == '+' ? str.substr(1) : str);
  }
  throw InvalidInput(std::string("field ") + field + " must be an integer (floats are rejected)");
}

std::int64_t parse_i64(const nlohmann::json& v, const char* field) {
  BigInt b = parse_integer(v, field);
  if (!fits_i64(b)) throw InvalidInput(std::string("field ") + field + " exceeds 64 bits");
  return b.convert_to<std::int64_t>();
}

std::vector<std::int64_t> parse_array(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field) || !doc.at(field).is_array())
    throw InvalidInput(std::string("missing integer array ") + field);
  std::vector<std::int64_t> out;
  for (const auto& v : doc.at(field)) out.push_back(parse_i64(v, field));
  return out;
}

}  // namespace

std::string Instance::digest() const {
  return hex64(fnv1a64(instance_to_json(*this).dump()));
}

Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidInput("instance document must be a JSON object");
  Instance inst;
  if (!doc.contains("k")) throw InvalidInput("missing field k");
  inst.k = static_cast<int>(parse_i64(doc.at("k"), "k"));
  inst.c = parse_array(doc, "c");
  inst.y = parse_array(doc, "y");
  if (!doc.contains("n")) throw InvalidInput("missing field n");
  inst.n = parse_integer(doc.at("n"), "n");
  if (doc.contains("s") && parse_i64(doc.at("s"), "s") != static_cast<std::int64_t>(inst.c.size()))
    throw InvalidInput("field s disagrees with length of c");
  if (inst.y.size() != inst.c.size()) throw InvalidInput("y and c must have equal length");
  if (inst.k < 1) throw InvalidInput("k must be >= 1");
  return inst;
}

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["k"] = inst.k;
  doc["s"] = inst.s();
  doc["c"] = inst.c;
  if (fits_i64(inst.n))
    doc["n"] = inst.n.convert_to<std::int64_t>();
  else
    doc["n"] = inst.n.str();
  doc["y"] = inst.y;
  return doc;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("instance file " + path + ": " + e.what());
  }
  return instance_from_json(doc);
}

Instance flagship_instance() {
  Instance inst;
  inst.k = 3;
  inst.c = {1, 1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1};
  inst.y = {2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  inst.n = 7;
  return inst;
}

std::optional<Instance> preset_instance(const std::string& name) {
  if (name == "flagship") return flagship_instance();
  Instance inst;
  if (name == "chain") {
    inst.k = 1;
    inst.c = {1, -1};
    inst.y = {1, 1};
  } else if (name == "quadratic6") {
    inst.k = 2;
    inst.c = {1, 1, 1, -1, -1, -1};
    inst.y = {1, 1, 1, 1, 1, 2};
  } else if (name == "singular3") {
    inst.k = 2;
    inst.c = {1, 1, -2};
    inst.y = {1, 1, 1};
  } else {
    return std::nullopt;
  }
  inst.n = diagonal_value(inst.k, inst.c, inst.y);
  return inst;
}

}  // namespace diagline
